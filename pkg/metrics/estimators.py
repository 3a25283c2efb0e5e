"""Оценки локальной и глобальной метрик T_L, T_G и средней скорости R̄."""
import logging
import math
from dataclasses import dataclass, field
from enum import Enum
from functools import partial
from typing import Sequence

import numpy as np
from scipy.interpolate import RegularGridInterpolator

from channel.models import ChannelKind, intra_cluster_gain, path_loss
from cluster.marks import resolve_max_matches, sample_cluster, schedule
from cluster.network_config import NetworkConfig
from config import config
from content.popularity import match_probability
from interference.field import ActivityMode, build_interference_field, interference_at
from interference.laplace import SlotCountLaw, estimate_slot_count_law, lt_interference_approx
from runner.pool import get_pool
from runner.statistics import batch_means
from runner.streams import RandomStreams

logger = logging.getLogger(__name__)

TABLE_ETA_POINTS = 96
TABLE_RADIUS_POINTS = 9
WINNER_TARGET_STD_ERROR = 0.005
WINNER_REPLICATE_CAP_FACTOR = 4


class MetricMethod(str, Enum):
    """Способ вычисления условной вероятности успешной передачи."""

    CLOSED_FORM = 'closed_form'
    LT_RAYLEIGH = 'lt_rayleigh'
    FULL_MONTE_CARLO = 'full_monte_carlo'


@dataclass(frozen=True)
class MetricEstimate:
    """Оценка метрики со стандартной ошибкой."""

    value: float
    std_error: float
    replicates: int
    method: MetricMethod

    def __post_init__(self):
        if self.std_error < 0:
            raise ValueError(f"Стандартная ошибка не может быть отрицательной: {self.std_error}")

    def scaled(self, factor: float) -> 'MetricEstimate':
        return MetricEstimate(self.value * factor, self.std_error * abs(factor), self.replicates, self.method)

    def lower(self, margin: float = 3.0) -> float:
        """Консервативная нижняя граница value - margin·std_error."""
        return self.value - margin * self.std_error


@dataclass
class ClusterSample:
    """Передачи кластера в начале координат за один блок слотов."""

    requests: int
    slots: int
    # P·|g|² (или P·l(S,D) для релеевской модели), помеха и |D| по каждой передаче
    signal: np.ndarray = field(default_factory=lambda: np.empty(0))
    interference: np.ndarray = field(default_factory=lambda: np.empty(0))
    radius: np.ndarray = field(default_factory=lambda: np.empty(0))

    @property
    def links(self) -> int:
        return self.signal.size


@dataclass
class PointMetrics:
    """T_L, T_G, R̄ и среднее число обслуженных запросов для набора скоростей."""

    rates: np.ndarray
    local: list[MetricEstimate]
    global_: list[MetricEstimate]
    average_rate: list[MetricEstimate]
    served: list[MetricEstimate]
    config_hash: str


def default_method(cfg: NetworkConfig) -> MetricMethod:
    if cfg.channel.kind == ChannelKind.WINNER_LOGNORMAL:
        return MetricMethod.FULL_MONTE_CARLO
    return MetricMethod.LT_RAYLEIGH


def link_positions(marks, plan) -> tuple[np.ndarray, np.ndarray]:
    links = plan.scheduled
    tx = marks.caching_positions[[transmitter for _, transmitter, _ in links]]
    rx = marks.requesting_positions[[receiver for _, _, receiver in links]]
    return tx.reshape(-1, 2), rx.reshape(-1, 2)


def origin_cluster_replicate(
    cfg: NetworkConfig,
    law: SlotCountLaw,
    method: MetricMethod,
    rng: np.random.Generator,
    index: int,
) -> ClusterSample:
    """
    Одна реплика кластера в начале координат.

    Метки кластера и поле помех разыгрываются независимо; при
    full_monte_carlo помеха считается в худшем случае B = 1.
    """
    marks = sample_cluster(cfg, (0.0, 0.0), rng)
    plan = schedule(marks, cfg.eps, cfg.n_m_max, rng)
    if plan.occupied == 0:
        return ClusterSample(requests=marks.n_requesting, slots=plan.slots)

    channel = cfg.channel
    tx, rx = link_positions(marks, plan)
    if channel.kind == ChannelKind.WINNER_LOGNORMAL:
        gain = intra_cluster_gain(tx, rx, rng, channel)
    else:
        # Замирания источника учитываются в условной ccdf
        gain = np.atleast_1d(path_loss(np.hypot(*(tx - rx).T), channel))

    interference = np.full(gain.size, np.nan)
    if method == MetricMethod.FULL_MONTE_CARLO:
        field_ = build_interference_field(cfg, law, rng)
        interference = np.array([
            interference_at(d, plan.slots, field_, channel, ActivityMode.WORST_CASE_B1, rng) for d in rx
        ])
    return ClusterSample(
        requests=marks.n_requesting,
        slots=plan.slots,
        signal=channel.transmit_power * gain,
        interference=interference,
        radius=np.hypot(rx[:, 0], rx[:, 1]),
    )


def sir_thresholds(slots, rates) -> np.ndarray:
    """2^{W·R} - 1 для каждой пары (передача, скорость)."""
    exponent = np.outer(np.asarray(slots, dtype=float), np.asarray(rates, dtype=float)) * math.log(2.0)
    with np.errstate(over='ignore'):
        return np.expm1(exponent)


def _laplace_lookup(cfg: NetworkConfig, law: SlotCountLaw, n1: int, etas: np.ndarray, radii: np.ndarray) -> np.ndarray:
    """
    Значения преобразования Лапласа в точках (eta, |d|) через таблицу.

    Таблица строится по log eta и |d|² ∈ [0, R_c²]; интерполируется log L.
    """
    values = np.ones(etas.shape)
    values[np.isinf(etas)] = 0.0
    finite = np.isfinite(etas) & (etas > 0)
    if not np.any(finite):
        return values

    log_eta = np.log(etas[finite])
    eta_axis = np.linspace(log_eta.min() - 1e-6, log_eta.max() + 1e-6, TABLE_ETA_POINTS)
    # Ось по |d|²: log L чётна по |d|
    square_axis = np.linspace(0.0, cfg.cluster_radius ** 2, TABLE_RADIUS_POINTS)
    points = np.column_stack((np.sqrt(square_axis), np.zeros_like(square_axis)))
    table = lt_interference_approx(np.exp(eta_axis)[:, None], points[None, :, :], n1, cfg, law)
    log_table = np.log(np.maximum(table, np.finfo(float).tiny))
    interpolator = RegularGridInterpolator((eta_axis, square_axis), log_table)
    squares = np.clip(np.broadcast_to(radii, etas.shape)[finite], 0.0, cfg.cluster_radius) ** 2
    query = np.column_stack((log_eta, squares))
    values[finite] = np.exp(interpolator(query))
    return values


def success_probabilities(
    samples: Sequence[ClusterSample],
    rates,
    cfg: NetworkConfig,
    law: SlotCountLaw,
    method: MetricMethod,
) -> np.ndarray:
    """
    Условная вероятность успеха каждой передачи при каждой скорости.

    Релеевская модель: exp(-θ·(I + N0)/(P·l)), где при lt_rayleigh
    E[exp(-θI/(P·l))] берётся из приближения преобразования Лапласа.
    Winner II: индикатор P·|g|²/(I + N0) > θ.

    Returns:
        np.ndarray: Матрица (передачи, скорости)
    """
    rates = np.asarray(rates, dtype=float)
    signal = np.concatenate([s.signal for s in samples]) if samples else np.empty(0)
    if signal.size == 0:
        return np.empty((0, rates.size))
    slots = np.concatenate([np.full(s.links, s.slots) for s in samples])
    interference = np.concatenate([s.interference for s in samples])
    radius = np.concatenate([s.radius for s in samples])
    thresholds = sir_thresholds(slots, rates)
    noise = cfg.channel.noise_power

    if cfg.channel.kind == ChannelKind.WINNER_LOGNORMAL:
        if method != MetricMethod.FULL_MONTE_CARLO:
            raise ValueError("Для модели Winner II доступен только метод full_monte_carlo")
        total = interference + noise
        sir = np.divide(signal, total, out=np.full_like(total, np.inf), where=total > 0)
        return (sir[:, None] > thresholds).astype(float)

    etas = thresholds / signal[:, None]
    with np.errstate(invalid='ignore'):
        noise_factor = np.exp(-np.nan_to_num(np.where(etas > 0, etas * noise, 0.0), nan=0.0))
    if method == MetricMethod.FULL_MONTE_CARLO:
        with np.errstate(invalid='ignore'):
            load = np.where(etas > 0, etas * interference[:, None], 0.0)
        return noise_factor * np.exp(-np.nan_to_num(load, nan=0.0))

    if method != MetricMethod.LT_RAYLEIGH:
        raise ValueError(f"Метод {method} не вычисляет вероятность успеха")
    transforms = np.ones_like(etas)
    for n1 in np.unique(slots):
        rows = slots == n1
        transforms[rows] = _laplace_lookup(cfg, law, int(n1), etas[rows], radius[rows, None])
    return noise_factor * transforms


def _collect(cfg: NetworkConfig, law: SlotCountLaw, method: MetricMethod, replicates: int,
             streams: RandomStreams, start: int = 0) -> list[ClusterSample]:
    return get_pool().map_replicates(
        partial(origin_cluster_replicate, cfg, law, method), replicates, streams, start=start,
    )


def _per_replicate(samples: list[ClusterSample], success: np.ndarray, rates: np.ndarray):
    """Обслуженные запросы и средняя вероятность успеха по репликам."""
    owners = np.repeat(np.arange(len(samples)), [s.links for s in samples])
    served = np.zeros((len(samples), rates.size))
    np.add.at(served, owners, success)
    links = np.array([s.links for s in samples], dtype=float)
    with np.errstate(invalid='ignore', divide='ignore'):
        mean_success = served / links[:, None]
    return served, mean_success, links > 0


def _largest_local_error(served: np.ndarray, cfg: NetworkConfig) -> float:
    return max(batch_means(column)[1] for column in served.T) / cfg.mean_requests


def evaluate_point(
    cfg: NetworkConfig,
    rates,
    streams: RandomStreams,
    replicates: int | None = None,
    method: MetricMethod | None = None,
    law: SlotCountLaw | None = None,
) -> PointMetrics:
    """
    T_L, T_G и R̄ для набора скоростей по одной выборке кластеров.

    Args:
        cfg: Конфигурация сети
        rates: Попытки скорости R (бит/использование канала)
        streams: Семейство случайных потоков
        replicates: Число реплик кластера в начале координат
        method: lt_rayleigh или full_monte_carlo (по умолчанию по типу канала)
        law: Закон числа слотов (оценивается, если не задан)

    Returns:
        PointMetrics: Оценки для каждой скорости
    """
    rates = np.atleast_1d(np.asarray(rates, dtype=float))
    if np.any(rates < 0):
        raise ValueError("Скорость не может быть отрицательной")
    method = MetricMethod(method) if method is not None else default_method(cfg)
    if method == MetricMethod.CLOSED_FORM:
        raise ValueError("closed_form даёт только верхние границы (см. metric_bounds)")
    if method == MetricMethod.LT_RAYLEIGH and cfg.channel.kind != ChannelKind.RAYLEIGH_POWER_LAW:
        raise ValueError("Приближение преобразования Лапласа определено только для релеевской модели")
    replicates = replicates or config.DEFAULT_REPLICATES

    cfg = resolve_max_matches(cfg, streams)
    if law is None:
        law = estimate_slot_count_law(cfg, replicates, streams)
    origin_streams = streams.child('origin')

    samples = _collect(cfg, law, method, replicates, origin_streams)
    success = success_probabilities(samples, rates, cfg, law, method)
    served, mean_success, attempted = _per_replicate(samples, success, rates)

    if cfg.channel.kind == ChannelKind.WINNER_LOGNORMAL and cfg.mean_requests > 0:
        cap = WINNER_REPLICATE_CAP_FACTOR * replicates
        while len(samples) < cap and _largest_local_error(served, cfg) > WINNER_TARGET_STD_ERROR:
            extra = _collect(cfg, law, method, min(len(samples), cap - len(samples)), origin_streams, start=len(samples))
            samples.extend(extra)
            success = success_probabilities(samples, rates, cfg, law, method)
            served, mean_success, attempted = _per_replicate(samples, success, rates)
            logger.debug(f"Winner II: реплик стало {len(samples)}")

    count = len(samples)
    coverage = cfg.parent_density * cfg.cluster_area
    local, global_, average, served_estimates = [], [], [], []
    for column, rate in enumerate(rates):
        mean_served, se_served = batch_means(served[:, column])
        served_estimates.append(MetricEstimate(mean_served, se_served, count, method))
        if cfg.mean_requests > 0:
            t_local = MetricEstimate(mean_served / cfg.mean_requests, se_served / cfg.mean_requests, count, method)
        else:
            t_local = MetricEstimate(0.0, 0.0, count, method)
        local.append(t_local)
        global_.append(t_local.scaled(coverage))
        mean_rate, se_rate = batch_means(mean_success[attempted, column])
        average.append(MetricEstimate(rate * mean_rate, rate * se_rate, int(attempted.sum()), method))

    logger.debug(
        f"Точка {cfg.config_hash()}: {count} реплик, T_L(R={rates[0]:.3g}) = {local[0].value:.4f}"
    )
    return PointMetrics(rates, local, global_, average, served_estimates, cfg.config_hash())


def local_metric(cfg: NetworkConfig, rate: float, streams: RandomStreams, **kwargs) -> MetricEstimate:
    """T_L: отношение среднего числа обслуженных запросов кластера к E[N_r]."""
    return evaluate_point(cfg, [rate], streams, **kwargs).local[0]


def global_metric(cfg: NetworkConfig, rate: float, streams: RandomStreams, **kwargs) -> MetricEstimate:
    """T_G = lambda_p·π·R_c²·T_L."""
    return evaluate_point(cfg, [rate], streams, **kwargs).global_[0]


def average_rate(cfg: NetworkConfig, rate: float, streams: RandomStreams, **kwargs) -> MetricEstimate:
    """R̄ = R·E⁰[вероятность успеха запланированной передачи]."""
    return evaluate_point(cfg, [rate], streams, **kwargs).average_rate[0]


def metric_bounds(cfg: NetworkConfig) -> tuple[MetricEstimate, MetricEstimate]:
    """
    Верхние границы T_L <= p_M и T_G <= lambda_p·p_M·π·R_c².

    Returns:
        tuple[MetricEstimate, MetricEstimate]: Границы для T_L и T_G
    """
    p_match = match_probability(cfg.content, cfg.lambda_u, cfg.cluster_radius)
    local = MetricEstimate(p_match, 0.0, 0, MetricMethod.CLOSED_FORM)
    return local, local.scaled(cfg.parent_density * cfg.cluster_area)
