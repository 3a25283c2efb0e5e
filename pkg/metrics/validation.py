"""Проверочные оценки: тождество Кэмпбелла и прямое моделирование обслуженных запросов."""
import logging
from dataclasses import dataclass
from functools import partial

import numpy as np

from channel.models import (
    ChannelKind,
    intra_cluster_gain,
    path_loss,
    penetration_counts,
    sample_rayleigh_power,
)
from cluster.marks import resolve_max_matches, sample_cluster, schedule
from cluster.network_config import NetworkConfig
from config import config
from geometry.point_processes import Window, sample_parents
from interference.field import ActivityMode, InterferenceField, build_interference_field, interference_at
from interference.laplace import SlotCountLaw, estimate_slot_count_law
from interference.rates import achievable_rate_bound
from metrics.estimators import (
    MetricEstimate,
    MetricMethod,
    evaluate_point,
    link_positions,
)
from runner.pool import get_pool
from runner.statistics import batch_means, ratio_estimate
from runner.streams import RandomStreams

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class CampbellCheck:
    """Сравнение прямого подсчёта в области K с λ_p·|K|·E⁰[N_sc]."""

    lhs: float
    rhs: float
    lhs_std_error: float
    rhs_std_error: float

    @property
    def discrepancy(self) -> float:
        """|lhs - rhs| / rhs (0, если обе стороны нулевые)."""
        if self.rhs == 0:
            return 0.0 if self.lhs == 0 else float('inf')
        return abs(self.lhs - self.rhs) / self.rhs

    @property
    def combined_std_error(self) -> float:
        return float(np.hypot(self.lhs_std_error, self.rhs_std_error))

    def within(self, margin: float = 3.0) -> bool:
        return abs(self.lhs - self.rhs) <= margin * self.combined_std_error


@dataclass(frozen=True)
class OracleEstimate:
    """Результат прямого моделирования условий обслуживания."""

    local: MetricEstimate
    average_rate: MetricEstimate
    served_per_cluster: MetricEstimate


def _success(signal: np.ndarray, interference: np.ndarray, slots: int, rate: float, cfg: NetworkConfig) -> np.ndarray:
    """R < R_a для каждой передачи при явно разыгранном усилении источника."""
    total = interference + cfg.channel.noise_power
    achievable = achievable_rate_bound(signal, total, slots, power=1.0)
    return np.atleast_1d(achievable) > rate


def _source_gain(tx: np.ndarray, rx: np.ndarray, cfg: NetworkConfig, rng: np.random.Generator) -> np.ndarray:
    channel = cfg.channel
    if channel.kind == ChannelKind.WINNER_LOGNORMAL:
        return intra_cluster_gain(tx, rx, rng, channel)
    distance = np.hypot(*(tx - rx).T)
    return sample_rayleigh_power(rng, distance.size) * path_loss(distance, channel)


def oracle_replicate(
    cfg: NetworkConfig,
    law: SlotCountLaw,
    rate: float,
    rng: np.random.Generator,
    index: int,
) -> tuple[int, int, int]:
    """
    Одна реплика: (N_r, число запланированных, число обслуженных).

    Запрос обслужен, если видео есть в кластере, запрос получил слот и
    R < R_a при явно разыгранных замираниях источника.
    """
    marks = sample_cluster(cfg, (0.0, 0.0), rng)
    plan = schedule(marks, cfg.eps, cfg.n_m_max, rng)
    if plan.occupied == 0:
        return marks.n_requesting, 0, 0
    tx, rx = link_positions(marks, plan)
    signal = cfg.channel.transmit_power * _source_gain(tx, rx, cfg, rng)
    field = build_interference_field(cfg, law, rng)
    interference = np.array([
        interference_at(d, plan.slots, field, cfg.channel, ActivityMode.WORST_CASE_B1, rng) for d in rx
    ])
    served = int(np.sum(_success(signal, interference, plan.slots, rate, cfg)))
    return marks.n_requesting, plan.occupied, served


def served_requests_oracle(
    cfg: NetworkConfig,
    rate: float,
    streams: RandomStreams,
    replicates: int | None = None,
    law: SlotCountLaw | None = None,
) -> OracleEstimate:
    """
    T_L и R̄ прямым моделированием событий обслуживания.

    T_L = E[N_sc] / (lambda_r·π·R_c²), R̄ = R·Σ обслуженных / Σ запланированных.
    """
    replicates = replicates or config.DEFAULT_REPLICATES
    cfg = resolve_max_matches(cfg, streams)
    if law is None:
        law = estimate_slot_count_law(cfg, replicates, streams)
    records = np.array(get_pool().map_replicates(
        partial(oracle_replicate, cfg, law, float(rate)), replicates, streams.child('oracle'),
    ), dtype=float).reshape(-1, 3)
    _, scheduled, served = records.T

    mean_served, se_served = batch_means(served)
    method = MetricMethod.FULL_MONTE_CARLO
    served_estimate = MetricEstimate(mean_served, se_served, replicates, method)
    local = served_estimate.scaled(1.0 / cfg.mean_requests) if cfg.mean_requests > 0 \
        else MetricEstimate(0.0, 0.0, replicates, method)
    ratio, ratio_se = ratio_estimate(served, scheduled)
    average = MetricEstimate(rate * ratio, rate * ratio_se, int(np.count_nonzero(scheduled)), method)
    return OracleEstimate(local, average, served_estimate)


def _neighbour_field(
    index: int,
    centers: np.ndarray,
    slot_counts: np.ndarray,
    cfg: NetworkConfig,
) -> InterferenceField:
    """Поле помех для кластера index из стационарной реализации."""
    offsets = centers - centers[index]
    reach = cfg.simulation_window.radius
    near = np.einsum('ij,ij->i', offsets, offsets) <= reach ** 2
    near[index] = False
    return InterferenceField(
        centers=offsets[near],
        slot_counts=slot_counts[near],
        penetrations=penetration_counts(offsets[near], cfg.parent),
        cluster_radius=cfg.cluster_radius,
        truncation_radius=reach,
    )


def stationary_replicate(
    cfg: NetworkConfig,
    law: SlotCountLaw,
    rate: float,
    region: Window,
    rng: np.random.Generator,
    index: int,
) -> float:
    """
    Число обслуженных запросов с приёмником в области K.

    Метки получают кластеры, круг которых пересекает K; остальные кластеры
    окна участвуют только числом слотов из закона law.
    """
    window = region.dilated(cfg.simulation_window.radius + cfg.cluster_radius)
    centers = sample_parents(cfg.parent, window, rng).points
    touching = np.flatnonzero(region.dilated(cfg.cluster_radius).contains(centers))
    slot_counts = law.sample(centers.shape[0], rng)

    plans = []
    for position in touching:
        marks = sample_cluster(cfg, centers[position], rng)
        plan = schedule(marks, cfg.eps, cfg.n_m_max, rng)
        slot_counts[position] = plan.slots
        plans.append((marks, plan))

    served = 0.0
    channel = cfg.channel
    for position, (marks, plan) in zip(touching, plans):
        if plan.occupied == 0:
            continue
        tx, rx = link_positions(marks, plan)
        in_region = region.contains(rx + centers[position])
        if not np.any(in_region):
            continue
        tx, rx = tx[in_region], rx[in_region]
        signal = channel.transmit_power * _source_gain(tx, rx, cfg, rng)
        field = _neighbour_field(position, centers, slot_counts, cfg)
        interference = np.array([
            interference_at(d, plan.slots, field, channel, ActivityMode.WORST_CASE_B1, rng) for d in rx
        ])
        served += float(np.sum(_success(signal, interference, plan.slots, rate, cfg)))
    return served


def campbell_identity_check(
    cfg: NetworkConfig,
    rate: float,
    region: Window,
    streams: RandomStreams,
    replicates: int | None = None,
) -> CampbellCheck:
    """
    Проверка E[N_s(K)] = lambda_p·|K|·E⁰[N_sc].

    Левая часть: прямой подсчёт в стационарной реализации; правая часть:
    полное моделирование кластера в начале координат.

    Args:
        cfg: Конфигурация сети
        rate: Попытка скорости R
        region: Область K (круг)
        streams: Семейство случайных потоков
        replicates: Число реплик для каждой стороны

    Returns:
        CampbellCheck: Обе стороны и их стандартные ошибки
    """
    replicates = replicates or config.DEFAULT_REPLICATES
    cfg = resolve_max_matches(cfg, streams)
    law = estimate_slot_count_law(cfg, replicates, streams)

    counts = get_pool().map_replicates(
        partial(stationary_replicate, cfg, law, float(rate), region), replicates, streams.child('stationary'),
    )
    lhs, lhs_se = batch_means(counts)

    point = evaluate_point(cfg, [rate], streams, replicates, MetricMethod.FULL_MONTE_CARLO, law)
    scale = cfg.parent_density * region.area
    rhs = point.served[0].scaled(scale)
    check = CampbellCheck(lhs, rhs.value, lhs_se, rhs.std_error)
    logger.info(
        f"Тождество Кэмпбелла: прямой подсчёт {lhs:.4f} ± {lhs_se:.4f}, "
        f"формула {rhs.value:.4f} ± {rhs.std_error:.4f}"
    )
    return check
