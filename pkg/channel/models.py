"""Модели затухания: релеевские замирания со степенным законом и модель Winner II."""
from dataclasses import dataclass, field
from enum import Enum

import numpy as np

from geometry.point_processes import ParentKind, ParentProcess


class ChannelKind(str, Enum):
    """Тип модели затухания."""

    RAYLEIGH_POWER_LAW = 'rayleigh'
    WINNER_LOGNORMAL = 'winner'


@dataclass(frozen=True)
class IntraClusterLaw:
    """Константы модели A1 (дБ): C1·log10(d) + C2 + C3·log10(f_c/5) + 5·N_w + χ."""

    c1: float
    c2: float
    c3: float
    sigma: float


@dataclass(frozen=True)
class InterClusterLaw:
    """Вариант модели B4 (дБ): 40·log10(d) + 41 + 22.7·log10(f_c/5) + 28·N_b + χ."""

    slope: float = 40.0
    intercept: float = 41.0
    frequency_coef: float = 22.7
    penetration_loss: float = 28.0
    sigma: float = 7.0


LOS_LAW = IntraClusterLaw(c1=18.7, c2=46.8, c3=20.0, sigma=3.0)
NLOS_LAW = IntraClusterLaw(c1=36.8, c2=43.8, c3=23.0, sigma=6.0)
WALL_LOSS_DB = 5.0
WALL_SPACING = 5.0


@dataclass(frozen=True)
class ChannelModel:
    """Параметры канала для одной точки эксперимента."""

    kind: ChannelKind = ChannelKind.RAYLEIGH_POWER_LAW
    alpha: float = 4.0
    c_tilde: float = 1.0
    power: float = 1.0
    carrier_ghz: float = 2.45
    tx_gain_db: float = 12.0
    rx_gain_db: float = 0.0
    tx_power_dbm: float = 20.0
    noise_power: float = 0.0
    los: IntraClusterLaw = field(default=LOS_LAW)
    nlos: IntraClusterLaw = field(default=NLOS_LAW)
    inter: InterClusterLaw = field(default_factory=InterClusterLaw)

    def __post_init__(self):
        if not self.alpha > 2:
            raise ValueError(f"Показатель затухания должен быть больше 2: {self.alpha}")
        if not self.power > 0:
            raise ValueError(f"Мощность передачи должна быть положительной: {self.power}")
        if self.noise_power < 0:
            raise ValueError(f"Мощность шума не может быть отрицательной: {self.noise_power}")

    @property
    def transmit_power(self) -> float:
        """P: для Winner P = 10^((G_t + G_r + P_tx)/10), иначе заданная мощность."""
        if self.kind == ChannelKind.WINNER_LOGNORMAL:
            return 10.0 ** ((self.tx_gain_db + self.rx_gain_db + self.tx_power_dbm) / 10.0)
        return self.power


def _distances(x: np.ndarray, y: np.ndarray) -> np.ndarray:
    diff = np.asarray(x, dtype=float).reshape(-1, 2) - np.asarray(y, dtype=float).reshape(-1, 2)
    return np.hypot(diff[:, 0], diff[:, 1])


def path_loss(d, model: ChannelModel):
    """Степенной закон C̃·d^-alpha; d = 0 недопустимо."""
    distance = np.asarray(d, dtype=float)
    if np.any(distance <= 0):
        raise ValueError("Расстояние должно быть положительным (передатчик совпадает с приёмником)")
    value = model.c_tilde * distance ** -model.alpha
    return float(value) if value.ndim == 0 else value


def sample_rayleigh_power(rng: np.random.Generator, size=None):
    """|h|² для релеевских замираний: экспоненциальное распределение со средним 1."""
    return rng.exponential(1.0, size=size)


def los_probability(d):
    """Вероятность прямой видимости модели A1: 1 при d <= 5, иначе формула Winner II."""
    distance = np.asarray(d, dtype=float)
    if np.any(distance <= 0):
        raise ValueError("Расстояние должно быть положительным")
    inner = 1.24 - 0.61 * np.log10(distance)
    value = 1.0 - 0.9 * np.cbrt(1.0 - inner ** 3)
    value = np.where(distance <= 5.0, 1.0, np.clip(value, 0.0, 1.0))
    return float(value) if value.ndim == 0 else value


def wall_count(d, los):
    """N_w: 0 при LOS, иначе 1 + floor((d/5 - 1)^+)."""
    distance = np.asarray(d, dtype=float)
    nlos_walls = 1 + np.floor(np.maximum(distance / WALL_SPACING - 1.0, 0.0))
    walls = np.where(np.asarray(los, dtype=bool), 0, nlos_walls).astype(int)
    return int(walls) if walls.ndim == 0 else walls


def intra_cluster_loss_db(d, los, shadowing_db, model: ChannelModel):
    """Затухание внутри кластера в дБ при известных LOS и χ."""
    distance = np.asarray(d, dtype=float)
    los = np.asarray(los, dtype=bool)
    c1 = np.where(los, model.los.c1, model.nlos.c1)
    c2 = np.where(los, model.los.c2, model.nlos.c2)
    c3 = np.where(los, model.los.c3, model.nlos.c3)
    loss = (c1 * np.log10(distance) + c2 + c3 * np.log10(model.carrier_ghz / 5.0)
            + WALL_LOSS_DB * wall_count(distance, los) + shadowing_db)
    return float(loss) if np.ndim(loss) == 0 else loss


def inter_cluster_loss_db(d, penetrations, shadowing_db, model: ChannelModel):
    """Затухание между кластерами в дБ при известных N_b и χ."""
    law = model.inter
    distance = np.asarray(d, dtype=float)
    loss = (law.slope * np.log10(distance) + law.intercept
            + law.frequency_coef * np.log10(model.carrier_ghz / 5.0)
            + law.penetration_loss * np.asarray(penetrations, dtype=float) + shadowing_db)
    return float(loss) if np.ndim(loss) == 0 else loss


def _db_to_gain(loss_db):
    return 10.0 ** (-np.asarray(loss_db, dtype=float) / 10.0)


def intra_cluster_gain_winner(x, y, rng: np.random.Generator, model: ChannelModel) -> np.ndarray:
    """
    |g|² внутри кластера по модели A1 для пар точек x -> y.

    LOS разыгрывается с вероятностью los_probability(d), затем берутся
    соответствующие константы, число стен и логнормальное затенение.
    """
    distance = _distances(x, y)
    if np.any(distance <= 0):
        raise ValueError("Передатчик и приёмник совпадают")
    los = rng.random(distance.size) < los_probability(distance)
    sigma = np.where(los, model.los.sigma, model.nlos.sigma)
    shadowing = rng.normal(0.0, 1.0, distance.size) * sigma
    return _db_to_gain(intra_cluster_loss_db(distance, los, shadowing, model))


def inter_cluster_gain_winner(x, y, penetrations, rng: np.random.Generator, model: ChannelModel) -> np.ndarray:
    """|h|²·l между кластерами по варианту модели B4 (без LOS, σ = 7 дБ)."""
    distance = _distances(x, y)
    penetrations = np.broadcast_to(np.asarray(penetrations), distance.shape)
    if np.any(penetrations < 1):
        raise ValueError("Число пересечённых кластеров N_b должно быть не меньше 1")
    shadowing = rng.normal(0.0, model.inter.sigma, distance.size)
    return _db_to_gain(inter_cluster_loss_db(distance, penetrations, shadowing, model))


def inter_cluster_gain(x, y, penetrations, rng: np.random.Generator, model: ChannelModel) -> np.ndarray:
    """Коэффициент затухания между кластерами для выбранной модели."""
    if model.kind == ChannelKind.WINNER_LOGNORMAL:
        return inter_cluster_gain_winner(x, y, penetrations, rng, model)
    distance = _distances(x, y)
    return sample_rayleigh_power(rng, distance.size) * path_loss(distance, model)


def intra_cluster_gain(x, y, rng: np.random.Generator, model: ChannelModel) -> np.ndarray:
    """|g|² внутри кластера; для релеевской модели совпадает с межкластерной."""
    if model.kind == ChannelKind.WINNER_LOGNORMAL:
        return intra_cluster_gain_winner(x, y, rng, model)
    distance = _distances(x, y)
    return sample_rayleigh_power(rng, distance.size) * path_loss(distance, model)


def penetration_counts(centers: np.ndarray, proc: ParentProcess, origin=(0.0, 0.0)) -> np.ndarray:
    """
    N_b между кластером в origin и кластерами в centers.

    Для Матерна II N_b = 1; для решётки число пересечённых кластеров
    max(1, round(||x1 - x2||_inf / delta)).
    """
    centers = np.asarray(centers, dtype=float).reshape(-1, 2)
    if proc.kind == ParentKind.MATERN_II:
        return np.ones(centers.shape[0], dtype=int)
    spread = np.abs(centers - np.asarray(origin, dtype=float)).max(axis=1)
    return np.maximum(1, np.rint(spread / proc.delta)).astype(int)
