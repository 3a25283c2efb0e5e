"""Обработчик подкоманды lt-compare: преобразование Лапласа помехи."""
import logging

import numpy as np

from channel.models import ChannelKind
from cli.context import ExperimentContext, collect
from cli.utils.validators import (
    ConfigError,
    validate_choice,
    validate_grid,
    validate_positive_float,
    validate_positive_int,
    validate_power_of_two,
)
from cluster.marks import resolve_max_matches
from interference.field import ActivityMode, Placement, monte_carlo_laplace
from interference.laplace import estimate_slot_count_law, lt_interference_approx
from services.experiment_service import ExperimentService

logger = logging.getLogger(__name__)

COLUMNS = ('radius', 'eta', 'lt_mc', 'lt_approx', 'mc_std_err', 'lt_mc_uniform', 'uniform_std_err')


def _eta_grid(section: dict) -> tuple[np.ndarray, list[float], int, ActivityMode]:
    errors: list[str] = []
    eta_min = collect(errors, validate_positive_float(section['eta_min'], 'lt-compare.eta_min'))
    eta_max = collect(errors, validate_positive_float(section['eta_max'], 'lt-compare.eta_max'))
    points = collect(errors, validate_positive_int(section['eta_points'], 'lt-compare.eta_points'))
    radii = collect(errors, validate_grid(section['radii'], 'lt-compare.radii'))
    n1 = collect(errors, validate_power_of_two(section['n1'], 'lt-compare.n1'))
    mode = collect(errors, validate_choice(section['activity'], [m.value for m in ActivityMode], 'lt-compare.activity'))
    if not errors and eta_min > eta_max:
        errors.append(f"lt-compare: eta_min={eta_min} больше eta_max={eta_max}")
    if errors:
        raise ConfigError(errors)
    return np.geomspace(eta_min, eta_max, points), radii, n1, ActivityMode(mode)


def lt_compare(context: ExperimentContext, experiment: ExperimentService) -> int:
    """
    LT_mc против приближения на логарифмической сетке eta.

    lt_mc считается с передатчиками в центрах мешающих кластеров, как в
    приближении; lt_mc_uniform с равномерными положениями в кластере на тех же
    реализациях сети. Приближение считается только для релеевской модели; для
    Winner II столбец lt_approx пуст.
    """
    etas, radii, n1, mode = _eta_grid(context.section)
    streams = context.streams
    cfg = resolve_max_matches(context.network, streams)
    law = estimate_slot_count_law(cfg, context.replicates, streams)
    rayleigh = cfg.channel.kind == ChannelKind.RAYLEIGH_POWER_LAW

    rows = []
    worst = 0.0
    for radius in radii:
        d = (radius, 0.0)
        child = streams.child(f'lt/{radius:g}')
        estimate = monte_carlo_laplace(
            cfg, law, d, n1, etas, context.replicates, child, mode, Placement.CLUSTER_CENTER,
        )
        uniform = monte_carlo_laplace(cfg, law, d, n1, etas, context.replicates, child, mode, Placement.UNIFORM)
        approx = lt_interference_approx(etas, d, n1, cfg, law) if rayleigh else [None] * etas.size
        columns = zip(etas, estimate.values, estimate.std_errors, approx, uniform.values, uniform.std_errors)
        for eta, value, error, guess, uniform_value, uniform_error in columns:
            rows.append((radius, eta, value, guess, error, uniform_value, uniform_error))
            if guess is not None:
                worst = max(worst, abs(value - guess))
        logger.info(f"LT при |d|={radius:g}: {etas.size} точек, {context.replicates} реплик")

    if rayleigh:
        logger.info(f"Наибольшее |LT_mc - LT_approx| = {worst:.4f}")
    context.report(COLUMNS, rows, n1=n1, activity=mode.value, n_m_max=cfg.n_m_max)
    return 0
