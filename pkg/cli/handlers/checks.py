"""Обработчики подкоманд density-check и validate."""
import logging

import numpy as np

from cli.context import ExperimentContext, collect
from cli.utils.validators import (
    ConfigError,
    validate_grid,
    validate_nonnegative_float,
    validate_positive_float,
    validate_positive_int,
)
from cluster.marks import resolve_max_matches
from geometry.point_processes import ParentKind
from interference.laplace import estimate_slot_count_law
from services.experiment_service import ExperimentService
from services.property_checks import (
    PropertyResult,
    activity_dominance_check,
    campbell_check,
    density_check,
    limit_check,
    match_probability_check,
    oracle_check,
    rate_dominance_check,
)

logger = logging.getLogger(__name__)

DENSITY_COLUMNS = ('parent', 'lam_disc', 'empirical', 'std_err', 'formula', 'relative_error', 'passed')
VALIDATE_COLUMNS = ('property', 'statistic', 'threshold', 'passed', 'detail')

EXIT_PROPERTY_FAILED = 1


def _density_rows(context: ExperimentContext, lam_disc: list[float], replicates: int, window_factor: float):
    delta = context.network.parent.delta
    rows = []
    for kind in ParentKind:
        rows.extend(density_check(
            kind, lam_disc, delta, replicates, context.streams.child('density'), window_factor,
        ))
    return rows


def density_command(context: ExperimentContext, experiment: ExperimentService) -> int:
    """Эмпирическая плотность Матерна II и решётки против формул."""
    section = context.section
    errors: list[str] = []
    lam_disc = collect(errors, validate_grid(section['lam_disc'], 'density-check.lam_disc'))
    replicates = collect(errors, validate_positive_int(section['replicates'], 'density-check.replicates'))
    window_factor = collect(errors, validate_positive_float(section['window_factor'], 'density-check.window_factor'))
    if not errors and min(lam_disc) <= 0:
        errors.append("density-check.lam_disc: значения должны быть положительными")
    if errors:
        raise ConfigError(errors)

    rows = _density_rows(context, lam_disc, replicates, window_factor)
    context.report(
        DENSITY_COLUMNS,
        [(r.parent, r.lam_disc, r.empirical, r.std_error, r.formula, r.relative_error, r.passed) for r in rows],
        density_replicates=replicates,
        window_factor=window_factor,
    )
    failed = [r for r in rows if not r.passed]
    for row in failed:
        logger.warning(f"Плотность {row.parent} (λπδ²={row.lam_disc:g}) вне допуска: {row.relative_error:.3%}")
    return EXIT_PROPERTY_FAILED if failed else 0


def validate_command(context: ExperimentContext, experiment: ExperimentService) -> int:
    """
    Полный набор проверок свойств модели.

    Плотности, p_M, доминирование скоростей и активности, тождество
    Кэмпбелла, прямой подсчёт обслуженных запросов и предел малых скоростей.
    Код возврата 1, если хоть одна проверка не прошла.
    """
    section = context.section
    errors: list[str] = []
    replicates = collect(errors, validate_positive_int(section['replicates'], 'validate.replicates'))
    match_replicates = collect(errors, validate_positive_int(section['match_replicates'], 'validate.match_replicates'))
    instances = collect(errors, validate_positive_int(section['rate_instances'], 'validate.rate_instances'))
    activity_replicates = collect(
        errors, validate_positive_int(section['activity_replicates'], 'validate.activity_replicates'))
    eta_points = collect(errors, validate_positive_int(section['activity_etas'], 'validate.activity_etas'))
    region_factor = collect(errors, validate_positive_float(section['region_factor'], 'validate.region_factor'))
    rate = collect(errors, validate_nonnegative_float(section['rate'], 'validate.rate'))
    if errors:
        raise ConfigError(errors)

    cfg = context.network
    streams = context.streams
    density = context.tree['density-check']
    lt_section = context.tree['lt-compare']
    results: list[PropertyResult] = []

    for row in _density_rows(context, density['lam_disc'], replicates, density['window_factor']):
        results.append(PropertyResult(
            f'density_{row.parent}_{row.lam_disc:g}', row.relative_error, 0.01, row.passed,
            f'эмпирическая {row.empirical:.6g}, формула {row.formula:.6g}',
        ))
    results.append(match_probability_check(cfg, match_replicates, streams))
    results.append(rate_dominance_check(instances, streams))

    resolved = resolve_max_matches(cfg, streams)
    law = estimate_slot_count_law(resolved, replicates, streams)
    etas = np.geomspace(lt_section['eta_min'], lt_section['eta_max'], eta_points)
    results.append(activity_dominance_check(resolved, law, etas, activity_replicates, streams))
    results.append(campbell_check(cfg, rate, region_factor, replicates, streams))
    results.append(oracle_check(cfg, rate, replicates, streams))
    results.extend(limit_check(cfg, context.tree['tl-sweep']['rates'], replicates, streams))

    for result in results:
        status = 'пройдена' if result.passed else 'НЕ пройдена'
        logger.info(f"Проверка {result.name}: {status} ({result.detail})")
    context.report(
        VALIDATE_COLUMNS,
        [(r.name, r.statistic, r.threshold, r.passed, r.detail) for r in results],
    )
    return 0 if all(r.passed for r in results) else EXIT_PROPERTY_FAILED
