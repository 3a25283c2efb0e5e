"""Родительские точечные процессы и процессы пользователей в ограниченном окне."""
import logging
from dataclasses import dataclass, field
from enum import Enum

import numpy as np
from scipy.spatial import cKDTree

logger = logging.getLogger(__name__)


class ParentKind(str, Enum):
    """Тип родительского процесса центров кластеров."""

    MATERN_II = 'matern_ii'
    TRANSLATED_GRID = 'translated_grid'


@dataclass(frozen=True)
class Window:
    """Круглое окно моделирования (метры)."""

    radius: float
    center: tuple[float, float] = (0.0, 0.0)

    def __post_init__(self):
        if not self.radius > 0:
            raise ValueError(f"Радиус окна должен быть положительным: {self.radius}")

    @property
    def area(self) -> float:
        return float(np.pi * self.radius ** 2)

    def dilated(self, margin: float) -> 'Window':
        """Окно, расширенное на margin."""
        return Window(self.radius + margin, self.center)

    def contains(self, points: np.ndarray) -> np.ndarray:
        """Маска точек, попавших в окно."""
        offsets = np.asarray(points, dtype=float).reshape(-1, 2) - np.asarray(self.center)
        return np.einsum('ij,ij->i', offsets, offsets) <= self.radius ** 2


@dataclass(frozen=True)
class ParentProcess:
    """Родительский hard-core процесс: Матерн II или сдвинутая решётка."""

    kind: ParentKind
    delta: float
    lam: float | None = None

    def __post_init__(self):
        if not self.delta > 0:
            raise ValueError(f"Зазор delta должен быть положительным: {self.delta}")
        if self.kind == ParentKind.MATERN_II and not (self.lam is not None and self.lam > 0):
            raise ValueError("Для процесса Матерна II нужна положительная интенсивность lam")

    @property
    def density(self) -> float:
        """Плотность центров кластеров lambda_p."""
        if self.kind == ParentKind.MATERN_II:
            return matern_ii_density(self.lam, self.delta)
        return self.delta ** -2


@dataclass
class PointSet:
    """Набор точек на плоскости, массив формы (n, 2)."""

    points: np.ndarray = field(default_factory=lambda: np.empty((0, 2)))

    def __post_init__(self):
        self.points = np.asarray(self.points, dtype=float).reshape(-1, 2)

    def __len__(self) -> int:
        return self.points.shape[0]

    def min_pairwise_distance(self) -> float:
        """Минимальное попарное расстояние (inf для менее чем двух точек)."""
        if len(self) < 2:
            return float('inf')
        distances, _ = cKDTree(self.points).query(self.points, k=2)
        return float(distances[:, 1].min())


def sample_uniform_disc(count: int, radius: float, rng: np.random.Generator) -> np.ndarray:
    """count точек, равномерно распределённых в круге радиуса radius с центром в нуле."""
    r = radius * np.sqrt(rng.random(count))
    theta = 2.0 * np.pi * rng.random(count)
    return np.column_stack((r * np.cos(theta), r * np.sin(theta)))


def _sample_poisson_annulus(lam: float, inner: float, outer: float, rng: np.random.Generator) -> np.ndarray:
    """Пуассоновский процесс в кольце inner < |x| <= outer с центром в нуле."""
    count = rng.poisson(lam * np.pi * (outer ** 2 - inner ** 2))
    r = np.sqrt(inner ** 2 + (outer ** 2 - inner ** 2) * rng.random(count))
    theta = 2.0 * np.pi * rng.random(count)
    return np.column_stack((r * np.cos(theta), r * np.sin(theta)))


def sample_poisson_pp(lam: float, window: Window, rng: np.random.Generator) -> PointSet:
    """
    Однородный пуассоновский процесс интенсивности lam в окне.

    Args:
        lam: Интенсивность (точек на м²), lam >= 0
        window: Окно моделирования
        rng: Генератор случайных чисел

    Returns:
        PointSet: Число точек ~ Poisson(lam·|window|), положения равномерные
    """
    if lam < 0:
        raise ValueError(f"Интенсивность не может быть отрицательной: {lam}")
    if lam == 0:
        return PointSet()
    count = rng.poisson(lam * window.area)
    return PointSet(sample_uniform_disc(count, window.radius, rng) + np.asarray(window.center))


def matern_ii_density(lam: float, delta: float) -> float:
    """Плотность процесса Матерна II: (1 - exp(-lam·π·delta²)) / (π·delta²)."""
    if lam < 0:
        raise ValueError(f"Интенсивность не может быть отрицательной: {lam}")
    if not delta > 0:
        raise ValueError(f"Зазор delta должен быть положительным: {delta}")
    if lam == 0:
        return 0.0
    disc = np.pi * delta ** 2
    return float(-np.expm1(-lam * disc) / disc)


def _matern_survivors(points: np.ndarray, marks: np.ndarray, delta: float) -> np.ndarray:
    """
    Маска выживших точек прореживания Матерна II.

    Точка выбывает, если в пределах delta есть точка с меньшей меткой;
    равные метки разрешаются по номеру точки.
    """
    keep = np.ones(points.shape[0], dtype=bool)
    if points.shape[0] < 2:
        return keep
    pairs = cKDTree(points).query_pairs(delta, output_type='ndarray')
    if pairs.size == 0:
        return keep
    first, second = pairs[:, 0], pairs[:, 1]
    first_wins = (marks[first] < marks[second]) | ((marks[first] == marks[second]) & (first < second))
    losers = np.where(first_wins, second, first)
    keep[losers] = False
    return keep


def sample_matern_ii(proc: ParentProcess, window: Window, rng: np.random.Generator) -> PointSet:
    """
    Процесс Матерна II в окне.

    Предложения генерируются в окне, расширенном на delta, чтобы у точек
    у края была полная конкуренция; выжившие обрезаются по окну.
    """
    if proc.kind != ParentKind.MATERN_II:
        raise ValueError(f"Ожидался процесс Матерна II, получен {proc.kind}")
    proposals = sample_poisson_pp(proc.lam, window.dilated(proc.delta), rng).points
    marks = rng.random(proposals.shape[0])
    survivors = proposals[_matern_survivors(proposals, marks, proc.delta)]
    return PointSet(survivors[window.contains(survivors)])


def sample_translated_grid(delta: float, window: Window, rng: np.random.Generator) -> PointSet:
    """Квадратная решётка с шагом delta, сдвинутая на два равномерных смещения из [0, delta)."""
    if not delta > 0:
        raise ValueError(f"Шаг решётки должен быть положительным: {delta}")
    offset = rng.uniform(0.0, delta, size=2)
    return PointSet(_grid_points(delta, offset, window))


def _grid_points(delta: float, offset: np.ndarray, window: Window) -> np.ndarray:
    cx, cy = window.center
    m = np.arange(np.floor((cx - window.radius - offset[0]) / delta),
                  np.ceil((cx + window.radius - offset[0]) / delta) + 1)
    n = np.arange(np.floor((cy - window.radius - offset[1]) / delta),
                  np.ceil((cy + window.radius - offset[1]) / delta) + 1)
    mm, nn = np.meshgrid(m, n, indexing='ij')
    points = np.column_stack((mm.ravel() * delta + offset[0], nn.ravel() * delta + offset[1]))
    return points[window.contains(points)]


def sample_parents(proc: ParentProcess, window: Window, rng: np.random.Generator) -> PointSet:
    """Стационарная реализация родительского процесса в окне."""
    if proc.kind == ParentKind.MATERN_II:
        return sample_matern_ii(proc, window, rng)
    return sample_translated_grid(proc.delta, window, rng)


def sample_palm_parents(
    proc: ParentProcess,
    window: Window,
    rng: np.random.Generator,
    max_attempts: int = 10_000,
) -> PointSet:
    """
    Реализация родительского процесса при условии кластера в начале координат.

    Сам центр в нуле не возвращается. Для Матерна II к предложениям добавляется
    точка в нуле со своей меткой, и реализация принимается, только если эта точка
    выжила; для решётки берётся несдвинутая решётка delta·Z².

    Предложения в круге радиуса delta и вне его независимы, поэтому сначала
    разыгрывается только круг: остальное окно моделируется после принятия.
    """
    if proc.kind == ParentKind.TRANSLATED_GRID:
        points = _grid_points(proc.delta, np.zeros(2), window)
        return PointSet(points[np.einsum('ij,ij->i', points, points) > 0])

    if window.center != (0.0, 0.0):
        raise ValueError(f"Окно для распределения Пальма должно быть с центром в нуле: {window.center}")
    padded = window.dilated(proc.delta)
    for attempt in range(max_attempts):
        origin_mark = rng.random()
        near = sample_poisson_pp(proc.lam, Window(proc.delta), rng).points
        near_marks = rng.random(near.shape[0])
        if np.any(near_marks <= origin_mark):
            continue
        far = _sample_poisson_annulus(proc.lam, proc.delta, padded.radius, rng)
        marks = np.concatenate((near_marks, rng.random(far.shape[0]), [origin_mark]))
        # Точка в нуле идёт последней
        points = np.vstack((near, far, np.zeros((1, 2))))
        keep = _matern_survivors(points, marks, proc.delta)
        survivors = points[:-1][keep[:-1]]
        if attempt:
            logger.debug(f"Палм-реализация принята с попытки {attempt + 1}")
        return PointSet(survivors[window.contains(survivors)])
    raise RuntimeError(f"Не удалось получить кластер в нуле за {max_attempts} попыток")
