"""Проверки свойств модели для подкоманд density-check и validate."""
import logging
import math
from dataclasses import dataclass, replace
from functools import partial

import numpy as np

from cluster.marks import resolve_max_matches
from cluster.network_config import NetworkConfig
from content.popularity import match_probability, sample_caches, sample_requests
from geometry.point_processes import ParentKind, ParentProcess, Window, sample_parents
from interference.field import ActivityMode, build_interference_field, interference_at
from interference.laplace import SlotCountLaw, estimate_slot_count_law
from interference.rates import achievable_rate_bound, exact_slot_rate_oracle
from metrics.estimators import MetricMethod, evaluate_point
from metrics.validation import campbell_identity_check, served_requests_oracle
from runner.pool import get_pool
from runner.statistics import batch_means
from runner.streams import RandomStreams

logger = logging.getLogger(__name__)

DENSITY_TOLERANCE = 0.01
SIGMA_MARGIN = 3.0
LIMIT_MARGIN = 2.0


@dataclass(frozen=True)
class PropertyResult:
    """Итог проверки одного свойства."""

    name: str
    statistic: float
    threshold: float
    passed: bool
    detail: str = ''


@dataclass(frozen=True)
class DensityRow:
    parent: str
    lam_disc: float
    empirical: float
    std_error: float
    formula: float

    @property
    def relative_error(self) -> float:
        return abs(self.empirical - self.formula) / self.formula

    @property
    def passed(self) -> bool:
        tolerance = max(DENSITY_TOLERANCE * self.formula, SIGMA_MARGIN * self.std_error)
        return abs(self.empirical - self.formula) <= tolerance


def _density_replicate(proc: ParentProcess, window: Window, rng: np.random.Generator, index: int) -> float:
    return len(sample_parents(proc, window, rng)) / window.area


def density_check(
    kind: ParentKind,
    lam_disc_values,
    delta: float,
    replicates: int,
    streams: RandomStreams,
    window_factor: float = 30.0,
) -> list[DensityRow]:
    """
    Эмпирическая плотность родительского процесса против формулы.

    Для Матерна II lambda = (lambda·π·delta²) / (π·delta²) по каждому значению
    lam_disc_values; для решётки проверяется delta^-2.
    """
    window = Window(window_factor * delta)
    values = list(lam_disc_values) if kind == ParentKind.MATERN_II else [float('nan')]
    rows = []
    for lam_disc in values:
        lam = lam_disc / (math.pi * delta ** 2) if kind == ParentKind.MATERN_II else None
        proc = ParentProcess(kind, delta, lam)
        densities = get_pool().map_replicates(
            partial(_density_replicate, proc, window), replicates, streams.child(f'density/{kind.value}/{lam_disc}'),
        )
        mean, error = batch_means(densities)
        rows.append(DensityRow(kind.value, lam_disc, mean, error, proc.density))
        logger.info(f"Плотность {kind.value} (λπδ²={lam_disc}): {mean:.6g} против {proc.density:.6g}")
    return rows


def _match_replicate(cfg: NetworkConfig, rng: np.random.Generator, index: int) -> float:
    """Найден ли запрос одного пользователя в кэшах кластера."""
    users = rng.poisson(cfg.lambda_u * cfg.cluster_area)
    request = sample_requests(cfg.content, 1, rng)[0]
    if users == 0:
        return 0.0
    return float(np.any(sample_caches(cfg.content, users, rng) == request))


def match_probability_check(cfg: NetworkConfig, replicates: int, streams: RandomStreams) -> PropertyResult:
    """p_M в замкнутой форме против моделирования отдельных кластеров."""
    hits = get_pool().map_replicates(partial(_match_replicate, cfg), replicates, streams.child('match'))
    mean, error = batch_means(hits)
    exact = match_probability(cfg.content, cfg.lambda_u, cfg.cluster_radius)
    if error > 0:
        score = abs(mean - exact) / error
    else:
        score = 0.0 if mean == exact else float('inf')
    return PropertyResult(
        'match_probability', score, SIGMA_MARGIN, score <= SIGMA_MARGIN,
        f'моделирование {mean:.6f}, формула {exact:.6f}',
    )


def rate_dominance_check(instances: int, streams: RandomStreams) -> PropertyResult:
    """
    Точная скорость с разделением времени не меньше нижней границы.

    Строгое неравенство требуется, когда фазы различаются.
    """
    rng = streams.child('rate-dominance').generator()
    violations = 0
    for _ in range(instances):
        n1 = int(2 ** rng.integers(0, 4))
        phases = rng.lognormal(0.0, 1.5, size=int(2 ** rng.integers(1, 4)))
        gain = float(rng.lognormal(0.0, 1.0))
        exact = exact_slot_rate_oracle(gain, phases, n1)
        bound = achievable_rate_bound(gain, float(phases.mean()), n1)
        differ = np.ptp(phases) > 1e-6 * phases.max()
        if exact < bound - 1e-12 or (differ and not exact > bound):
            violations += 1
    return PropertyResult('rate_dominance', violations, 0, violations == 0, f'{instances} случаев')


def activity_pair_replicate(
    cfg: NetworkConfig,
    law: SlotCountLaw,
    d: tuple[float, float],
    n1: int,
    rng: np.random.Generator,
    index: int,
) -> tuple[float, float]:
    """Помеха при B = 1 и при случайных B на одной реализации сети и замираний."""
    field = build_interference_field(cfg, law, rng)
    state = rng.bit_generator.state
    worst = interference_at(d, n1, field, cfg.channel, ActivityMode.WORST_CASE_B1, rng)
    rng.bit_generator.state = state
    random = interference_at(d, n1, field, cfg.channel, ActivityMode.RANDOM_B, rng)
    return worst, random


def activity_dominance_check(
    cfg: NetworkConfig,
    law: SlotCountLaw,
    etas,
    replicates: int,
    streams: RandomStreams,
    d=(0.0, 0.0),
    n1: int = 1,
) -> PropertyResult:
    """
    Преобразование Лапласа при B = 1 не больше, чем при случайных B.

    Сравниваются парные разности exp(-eta·I) при каждом eta с запасом
    в три стандартные ошибки.
    """
    pairs = np.asarray(get_pool().map_replicates(
        partial(activity_pair_replicate, cfg, law, tuple(d), n1), replicates, streams.child('activity'),
    ))
    worst_score = -float('inf')
    for eta in np.asarray(etas, dtype=float):
        difference = np.exp(-eta * pairs[:, 0]) - np.exp(-eta * pairs[:, 1])
        mean, error = batch_means(difference)
        worst_score = max(worst_score, mean - SIGMA_MARGIN * error)
    return PropertyResult(
        'activity_dominance', worst_score, 0.0, worst_score <= 0.0,
        f'{len(etas)} значений eta, {replicates} реплик',
    )


def campbell_check(cfg: NetworkConfig, rate: float, region_factor: float, replicates: int,
                   streams: RandomStreams) -> PropertyResult:
    check = campbell_identity_check(cfg, rate, Window(region_factor * cfg.parent.delta), streams, replicates)
    if check.combined_std_error > 0:
        score = abs(check.lhs - check.rhs) / check.combined_std_error
    else:
        score = 0.0 if check.lhs == check.rhs else float('inf')
    return PropertyResult(
        'campbell_identity', score, SIGMA_MARGIN, check.within(SIGMA_MARGIN),
        f'прямой подсчёт {check.lhs:.4f}, формула {check.rhs:.4f}, расхождение {check.discrepancy:.3%}',
    )


def oracle_check(cfg: NetworkConfig, rate: float, replicates: int, streams: RandomStreams,
                 method: MetricMethod = MetricMethod.FULL_MONTE_CARLO) -> PropertyResult:
    """T_L по формуле через вероятности успеха против прямого подсчёта обслуженных запросов."""
    cfg = resolve_max_matches(cfg, streams)
    law = estimate_slot_count_law(cfg, replicates, streams)
    oracle = served_requests_oracle(cfg, rate, streams.child('oracle'), replicates, law)
    formula = evaluate_point(cfg, [rate], streams.child('formula'), replicates, method, law).local[0]
    error = math.hypot(oracle.local.std_error, formula.std_error)
    gap = abs(oracle.local.value - formula.value)
    if error > 0:
        score = gap / error
    else:
        score = 0.0 if gap == 0 else float('inf')
    return PropertyResult(
        'served_requests_oracle', score, SIGMA_MARGIN, score <= SIGMA_MARGIN,
        f'прямой подсчёт {oracle.local.value:.4f}, формула {formula.value:.4f} ({method.value})',
    )


def limit_check(cfg: NetworkConfig, rates, replicates: int, streams: RandomStreams) -> list[PropertyResult]:
    """
    При eps = 0 и R -> 0 метрика T_L стремится к p_M; по R она не возрастает.

    Все скорости оцениваются на одной выборке, поэтому монотонность
    проверяется с запасом только на округление.
    """
    cfg = replace(cfg, eps=0.0)
    rates = np.sort(np.asarray(rates, dtype=float))
    point = evaluate_point(cfg, rates, streams.child('limit'), replicates)
    exact = match_probability(cfg.content, cfg.lambda_u, cfg.cluster_radius)
    smallest = point.local[0]
    if smallest.std_error > 0:
        score = abs(smallest.value - exact) / smallest.std_error
    else:
        score = 0.0 if math.isclose(smallest.value, exact) else float('inf')

    values = np.array([estimate.value for estimate in point.local])
    rise = float(np.max(np.diff(values), initial=0.0))
    return [
        PropertyResult(
            'low_rate_limit', score, LIMIT_MARGIN, score <= LIMIT_MARGIN,
            f'T_L(R={rates[0]:g}) = {smallest.value:.4f}, p_M = {exact:.4f}',
        ),
        PropertyResult('local_monotone', rise, 1e-12, rise <= 1e-12, f'{rates.size} скоростей'),
    ]
