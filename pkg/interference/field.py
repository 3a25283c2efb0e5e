"""Поле помех от других кластеров и его преобразование Лапласа методом Монте-Карло."""
import logging
from dataclasses import dataclass
from enum import Enum
from functools import partial

import numpy as np

from channel.models import ChannelModel, inter_cluster_gain, penetration_counts
from cluster.network_config import NetworkConfig
from geometry.point_processes import sample_palm_parents, sample_uniform_disc
from interference.laplace import SlotCountLaw
from runner.pool import get_pool
from runner.statistics import batch_means
from runner.streams import RandomStreams

logger = logging.getLogger(__name__)


class ActivityMode(str, Enum):
    """Как распределяются подслоты кластера между его передатчиками."""

    WORST_CASE_B1 = 'worst_case_b1'
    RANDOM_B = 'random_b'


class Placement(str, Enum):
    """Где находятся передатчики мешающего кластера."""

    UNIFORM = 'uniform'
    CLUSTER_CENTER = 'cluster_center'


@dataclass
class InterferenceField:
    """
    Кластеры, мешающие кластеру в начале координат.

    Сам кластер в нуле не входит; все центры дальше delta и не дальше
    радиуса усечения.
    """

    centers: np.ndarray
    slot_counts: np.ndarray
    penetrations: np.ndarray
    cluster_radius: float
    truncation_radius: float

    def __len__(self) -> int:
        return self.centers.shape[0]


@dataclass(frozen=True)
class LaplaceEstimate:
    """Оценка преобразования Лапласа на сетке аргументов."""

    etas: np.ndarray
    values: np.ndarray
    std_errors: np.ndarray
    replicates: int


def build_interference_field(cfg: NetworkConfig, law: SlotCountLaw, rng: np.random.Generator) -> InterferenceField:
    """
    Разыграть мешающие кластеры при условии кластера в начале координат.

    Метки кластеров независимы, поэтому числа слотов берутся из закона law.
    """
    window = cfg.simulation_window
    centers = sample_palm_parents(cfg.parent, window, rng).points
    return InterferenceField(
        centers=centers,
        slot_counts=law.sample(centers.shape[0], rng),
        penetrations=penetration_counts(centers, cfg.parent),
        cluster_radius=cfg.cluster_radius,
        truncation_radius=window.radius,
    )


def _activity_weights(per_cluster: np.ndarray, mode: ActivityMode, rng: np.random.Generator) -> np.ndarray:
    """
    Веса (n1/2^i)·B_{x,j,i} для каждого активного передатчика.

    Для кластеров с W <= n1 вес 1, для W = 2^i > n1 сумма B по 2^i/n1
    передатчикам равна 2^i/n1.
    """
    owner_offsets = np.cumsum(per_cluster) - per_cluster
    activity = np.ones(int(per_cluster.sum()))
    if mode == ActivityMode.RANDOM_B:
        for k in np.unique(per_cluster[per_cluster > 1]):
            rows = np.flatnonzero(per_cluster == k)
            draws = rng.multinomial(k, np.full(k, 1.0 / k), size=rows.size)
            activity[(owner_offsets[rows][:, None] + np.arange(k)[None, :]).ravel()] = draws.ravel()
    return activity / np.repeat(per_cluster, per_cluster)


def interference_at(
    d,
    n1: int,
    field: InterferenceField,
    channel: ChannelModel,
    mode: ActivityMode = ActivityMode.WORST_CASE_B1,
    rng: np.random.Generator | None = None,
    placement: Placement = Placement.UNIFORM,
) -> float:
    """
    Усреднённая по слоту помеха в точке d кластера, имеющего n1 слотов.

    Кластер с W_x <= n1 даёт мощность одного передатчика; кластер с
    W_x = 2^i > n1 даёт (n1/2^i)·Σ_j B_{x,j,i}·P·|h|²·l по 2^i/n1 передатчикам,
    положения которых равномерны в его круге (или совпадают с его центром
    при placement=CLUSTER_CENTER). Все слоты считаются занятыми.
    """
    if n1 < 1 or n1 & (n1 - 1):
        raise ValueError(f"Число слотов должно быть степенью двойки: {n1}")
    rng = rng if rng is not None else np.random.default_rng()
    active = field.slot_counts > 0
    if not np.any(active):
        return 0.0

    slots = field.slot_counts[active]
    per_cluster = np.maximum(slots // n1, 1)
    owners = np.repeat(np.flatnonzero(active), per_cluster)
    positions = field.centers[owners]
    if Placement(placement) == Placement.UNIFORM:
        positions = positions + sample_uniform_disc(owners.size, field.cluster_radius, rng)
    gains = inter_cluster_gain(positions, np.asarray(d, dtype=float), field.penetrations[owners], rng, channel)
    weights = _activity_weights(per_cluster, ActivityMode(mode), rng)
    return float(channel.transmit_power * np.dot(weights, gains))


def interference_replicate(
    cfg: NetworkConfig,
    law: SlotCountLaw,
    d,
    n1: int,
    mode: ActivityMode,
    placement: Placement,
    rng: np.random.Generator,
    index: int,
) -> float:
    """Одна реплика: новая сеть и помеха в точке d."""
    field = build_interference_field(cfg, law, rng)
    return interference_at(d, n1, field, cfg.channel, mode, rng, placement)


def monte_carlo_laplace(
    cfg: NetworkConfig,
    law: SlotCountLaw,
    d,
    n1: int,
    etas,
    replicates: int,
    streams: RandomStreams,
    mode: ActivityMode = ActivityMode.WORST_CASE_B1,
    placement: Placement = Placement.UNIFORM,
) -> LaplaceEstimate:
    """
    Оценка E[exp(-eta·I(d, n1))] по replicates независимым реализациям сети.

    При placement=CLUSTER_CENTER передатчики стоят в центрах своих кластеров:
    так проверяется только замена процесса Матерна II пуассоновским.

    Returns:
        LaplaceEstimate: Значения и стандартные ошибки для каждого eta
    """
    etas = np.asarray(etas, dtype=float).reshape(-1)
    point = tuple(np.asarray(d, dtype=float))
    samples = np.asarray(get_pool().map_replicates(
        partial(interference_replicate, cfg, law, point, n1, ActivityMode(mode), Placement(placement)),
        replicates,
        streams,
    ))
    values, errors = [], []
    for eta in etas:
        mean, error = batch_means(np.exp(-eta * samples))
        values.append(mean)
        errors.append(error)
    logger.debug(f"LT Монте-Карло: {replicates} реплик, средняя помеха {samples.mean():.3e}")
    return LaplaceEstimate(etas, np.array(values), np.array(errors), replicates)
