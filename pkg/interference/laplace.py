"""Закон числа слотов и приближённое преобразование Лапласа помехи."""
import logging
from dataclasses import dataclass
from functools import partial

import numpy as np

from cluster.marks import match_count_replicate, resolve_max_matches, slot_count
from cluster.network_config import NetworkConfig
from config import config
from runner.pool import get_pool
from runner.streams import RandomStreams

logger = logging.getLogger(__name__)

LAW_TOLERANCE = 1e-9
BASE_ANGULAR_NODES = 64
BASE_RADIAL_PANELS = 16
GAUSS_ORDER = 8
# Ограничение на размер промежуточного массива (пары × узлы)
MAX_BLOCK_ELEMENTS = 4_000_000


class QuadratureError(ArithmeticError):
    """Квадратура не сошлась за допустимое число уточнений."""


@dataclass(frozen=True)
class SlotCountLaw:
    """
    Распределение числа слотов W кластера.

    probabilities[i] = P(W = 2^i | N_m >= 1), i = 0..log2(Delta);
    empty_probability = P(N_m = 0): такие кластеры не создают помех.
    """

    probabilities: np.ndarray
    empty_probability: float = 0.0

    def __post_init__(self):
        probabilities = np.asarray(self.probabilities, dtype=float)
        if probabilities.ndim != 1 or probabilities.size == 0:
            raise ValueError("Закон числа слотов должен быть непустым вектором")
        if np.any(probabilities < 0) or abs(probabilities.sum() - 1.0) > LAW_TOLERANCE:
            raise ValueError(f"Вероятности закона числа слотов должны суммироваться к 1: {probabilities.sum()}")
        if not 0 <= self.empty_probability <= 1:
            raise ValueError(f"Недопустимая вероятность пустого кластера: {self.empty_probability}")
        object.__setattr__(self, 'probabilities', probabilities)

    @property
    def max_slots(self) -> int:
        return 1 << (self.probabilities.size - 1)

    @property
    def slot_values(self) -> np.ndarray:
        return 1 << np.arange(self.probabilities.size)

    def mode(self) -> int:
        """Наиболее вероятное число слотов среди непустых кластеров."""
        return int(self.slot_values[np.argmax(self.probabilities)])

    def sample(self, size: int, rng: np.random.Generator) -> np.ndarray:
        """Число слотов для size независимых кластеров (0 для пустых)."""
        nonempty = rng.random(size) >= self.empty_probability
        exponents = rng.choice(self.probabilities.size, size=size, p=self.probabilities)
        return np.where(nonempty, 1 << exponents, 0)


def estimate_slot_count_law(cfg: NetworkConfig, replicates: int, streams: RandomStreams) -> SlotCountLaw:
    """
    Эмпирический закон W(min(N_m, n_m_max), eps) по независимым кластерам.

    Args:
        cfg: Конфигурация сети
        replicates: Число разыгранных кластеров
        streams: Семейство случайных потоков

    Returns:
        SlotCountLaw: Распределение при N_m >= 1 и доля пустых кластеров
    """
    if replicates < 1:
        raise ValueError(f"Нужна хотя бы одна реплика: {replicates}")
    cfg = resolve_max_matches(cfg, streams)
    counts = np.asarray(get_pool().map_replicates(
        partial(match_count_replicate, cfg), replicates, streams.child('slot-law'),
    ), dtype=int)

    exponents = int(cfg.max_slots).bit_length()
    nonempty = counts[counts > 0]
    if nonempty.size == 0:
        logger.warning("Ни в одном кластере нет совпадений: закон вырожден")
        point_mass = np.zeros(exponents)
        point_mass[0] = 1.0
        return SlotCountLaw(point_mass, empty_probability=1.0)

    slots = np.array([slot_count(min(int(n), cfg.max_slots), cfg.eps) for n in nonempty])
    histogram = np.bincount(np.log2(slots).astype(int), minlength=exponents).astype(float)
    law = SlotCountLaw(histogram / histogram.sum(), empty_probability=1.0 - nonempty.size / counts.size)
    logger.debug(f"Закон числа слотов: {law.probabilities.round(4).tolist()}, пустых {law.empty_probability:.4f}")
    return law


def _slot_classes(law: SlotCountLaw, n1: int) -> tuple[np.ndarray, np.ndarray]:
    """Веса и показатели ceil(2^i / n1), сгруппированные по показателю."""
    weights = (1.0 - law.empty_probability) * law.probabilities
    exponents = np.maximum(law.slot_values // n1, 1)
    classes = np.unique(exponents)
    grouped = np.array([weights[exponents == c].sum() for c in classes])
    return classes.astype(float), grouped


def _quadrature_nodes(inner: float, outer: float, level: int) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """Полярная сетка: трапеции по углу, Гаусс-Лежандр на панелях по log r."""
    n_theta = BASE_ANGULAR_NODES << level
    theta = 2.0 * np.pi * (np.arange(n_theta) + 0.5) / n_theta
    panels = BASE_RADIAL_PANELS << level
    edges = np.linspace(np.log(inner), np.log(outer), panels + 1)
    nodes, weights = np.polynomial.legendre.leggauss(GAUSS_ORDER)
    half = 0.5 * np.diff(edges)
    mid = 0.5 * (edges[:-1] + edges[1:])
    u = (mid[:, None] + half[:, None] * nodes[None, :]).ravel()
    wu = (half[:, None] * weights[None, :]).ravel()
    r = np.exp(u)
    # dx = r·dr·dθ = r²·du·dθ
    radial_weights = wu * r * r
    xs = (r[:, None] * np.cos(theta)[None, :]).ravel()
    ys = (r[:, None] * np.sin(theta)[None, :]).ravel()
    ws = (radial_weights[:, None] * np.full(n_theta, 2.0 * np.pi / n_theta)[None, :]).ravel()
    return xs, ys, ws


def _lt_integral(
    etas: np.ndarray,
    radii: np.ndarray,
    classes: np.ndarray,
    class_weights: np.ndarray,
    cfg: NetworkConfig,
    level: int,
) -> np.ndarray:
    """Интеграл по ||x|| > delta для каждой пары (eta, |d|), включая хвост за rho."""
    channel = cfg.channel
    inner = cfg.parent.delta
    outer = cfg.simulation_window.radius
    xs, ys, ws = _quadrature_nodes(inner, outer, level)
    scale = channel.transmit_power * channel.c_tilde

    result = np.empty(etas.size)
    block = max(1, MAX_BLOCK_ELEMENTS // xs.size)
    for start in range(0, etas.size, block):
        stop = min(start + block, etas.size)
        dx = xs[None, :] - radii[start:stop, None]
        dist_sq = dx * dx + ys[None, :] ** 2
        load = scale * etas[start:stop, None] * dist_sq ** (-channel.alpha / 2.0)
        integrand = np.zeros_like(load)
        for c, weight in zip(classes, class_weights):
            integrand += weight * -np.expm1(-c * np.log1p(load / c))
        result[start:stop] = integrand @ ws

    # Хвост за rho: 1 - (1 + a/c)^-c ≈ a, интерференты в центре своих кластеров
    tail = 2.0 * np.pi * scale * etas * outer ** (2.0 - channel.alpha) / (channel.alpha - 2.0)
    return result + tail * class_weights.sum()


def lt_interference_approx(eta, d, n1: int, cfg: NetworkConfig, law: SlotCountLaw):
    """
    Приближённое преобразование Лапласа помехи I(d, n1) для процесса Матерна II.

    Центры кластеров заменяются пуассоновским процессом интенсивности
    lambda_p·1{||x|| > delta}, интерференты помещаются в центры своих кластеров:

        L(eta) ≈ exp{-lambda_p Σ_i P(W=2^i) ∫ [1 - (1 + P·l(x,d)·eta/c_i)^-c_i] dx},
        c_i = ceil(2^i / n1).

    Args:
        eta: Аргумент (скаляр или массив)
        d: Точка кластера в начале координат, массив (..., 2)
        n1: Число слотов кластера в начале координат
        cfg: Конфигурация сети (релеевская модель)
        law: Закон числа слотов

    Returns:
        Значение(я) в (0, 1] той же формы, что broadcast(eta, |d|)
    """
    if n1 < 1 or n1 & (n1 - 1):
        raise ValueError(f"Число слотов должно быть степенью двойки: {n1}")
    eta = np.asarray(eta, dtype=float)
    if np.any(eta < 0):
        raise ValueError("Аргумент преобразования Лапласа не может быть отрицательным")
    d = np.asarray(d, dtype=float)
    radius = np.hypot(d[..., 0], d[..., 1])
    eta, radius = np.broadcast_arrays(eta, radius)
    shape = eta.shape
    etas, radii = eta.ravel().copy(), radius.ravel().copy()

    density = cfg.parent_density
    if density == 0 or etas.size == 0:
        values = np.ones(shape)
        return float(values) if values.ndim == 0 else values

    classes, class_weights = _slot_classes(law, n1)
    previous = _lt_integral(etas, radii, classes, class_weights, cfg, level=0)
    for level in range(1, config.LT_MAX_REFINEMENTS + 1):
        current = _lt_integral(etas, radii, classes, class_weights, cfg, level)
        change = np.abs(current - previous)
        if np.all(change <= config.LT_TOLERANCE * np.maximum(np.abs(current), np.finfo(float).tiny)):
            break
        previous = current
    else:
        worst = float(np.max(change / np.maximum(np.abs(current), np.finfo(float).tiny)))
        raise QuadratureError(f"Квадратура не сошлась: относительное изменение {worst:.3e}")

    values = np.exp(-density * current).reshape(shape)
    return float(values) if values.ndim == 0 else values
