"""Обработчики подкоманд tradeoff-global, tradeoff-local и tradeoff-localglobal."""
import logging
from typing import Callable

from cli.context import ExperimentContext, apply_variant, build_network, collect, resolve_method
from cli.utils.validators import (
    ConfigError,
    validate_grid,
    validate_nonnegative_float,
    validate_positive_int,
    validate_range,
)
from runner.streams import RandomStreams
from services.experiment_service import ExperimentService
from tradeoff.optimizers import (
    SweepEvaluator,
    SweepGrid,
    TradeoffPoint,
    optimize_global,
    optimize_local,
    optimize_local_global,
)

logger = logging.getLogger(__name__)

COLUMNS = (
    'density_floor', 'constraint', 'objective', 'objective_std_err', 'feasible',
    'cluster_radius', 'delta', 'lam', 'rate', 'parent_density', 'local',
)

# Все три подкоманды делят оценки точек сетки (и кэш в базе)
STREAM_PURPOSE = 'tradeoff'


def build_grid(section: dict) -> SweepGrid:
    """
    Сетка перебора из раздела [tradeoff].

    Raises:
        ConfigError: Некорректные диапазоны или пороги
    """
    errors: list[str] = []
    ranges = {
        name: collect(errors, validate_range(section[name], f'tradeoff.{name}'))
        for name in ('cluster_radius', 'rate', 'lam', 'delta_ratio')
    }
    points = collect(errors, validate_positive_int(section['points'], 'tradeoff.points'))
    floors = {
        name: collect(errors, validate_grid(section[name], f'tradeoff.{name}'))
        for name in ('rate_floors', 'density_floors', 'local_floors')
    }
    if errors:
        raise ConfigError(errors)
    try:
        return SweepGrid.spaced(points=points, **ranges, **floors)
    except ValueError as e:
        raise ConfigError(f"tradeoff: {e}") from e


def _rows(frontier: list[TradeoffPoint]) -> list[tuple]:
    rows = []
    for point in frontier:
        params = point.parameters
        rows.append((
            point.density_floor,
            point.constraint,
            point.objective.value,
            point.objective.std_error,
            point.feasible,
            params.get('cluster_radius'),
            params.get('delta'),
            params.get('lam'),
            params.get('rate'),
            params.get('parent_density'),
            params.get('local'),
        ))
    return rows


def _run_variants(
    context: ExperimentContext,
    experiment: ExperimentService,
    optimize: Callable[[SweepGrid, SweepEvaluator], list[TradeoffPoint]],
) -> int:
    """Построить фронт для каждого варианта кривой и записать по CSV на вариант."""
    section = context.section
    grid = build_grid(section)
    method = resolve_method(section['method'], 'tradeoff.method')
    streams = RandomStreams(context.seed, STREAM_PURPOSE)
    variants = section['variants']
    if not isinstance(variants, list) or not variants or not all(isinstance(v, dict) for v in variants):
        raise ConfigError("tradeoff.variants: ожидался непустой список таблиц")

    for variant in variants:
        label, tree = apply_variant(context.tree, variant)
        evaluator = SweepEvaluator(
            build_network(tree),
            streams,
            context.replicates,
            method=method,
            repository=experiment.evaluation_repo,
            run_id=experiment.run_id,
        )
        logger.info(f"{context.command}: вариант {label}, метод {evaluator.method.value}")
        frontier = optimize(grid, evaluator)
        context.report(
            COLUMNS,
            _rows(frontier),
            suffix=None if label == 'base' else label,
            variant=label,
            method=evaluator.method.value,
        )
    return 0


def tradeoff_global(context: ExperimentContext, experiment: ExperimentService) -> int:
    """Фронт (r, max T_G) при ограничении R̄ >= r."""
    return _run_variants(context, experiment, optimize_global)


def tradeoff_local(context: ExperimentContext, experiment: ExperimentService) -> int:
    """Фронт (r, max T_L) для каждого порога плотности кластеров."""
    return _run_variants(context, experiment, optimize_local)


def tradeoff_local_global(context: ExperimentContext, experiment: ExperimentService) -> int:
    """Фронт (t_c, max T_G) при фиксированной скорости."""
    ok, rate, message = validate_nonnegative_float(context.section['fixed_rate'], 'tradeoff.fixed_rate')
    if not ok:
        raise ConfigError(message)
    return _run_variants(context, experiment, lambda grid, evaluator: optimize_local_global(grid, evaluator, rate))
