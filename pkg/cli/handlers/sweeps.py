"""Обработчик подкоманды tl-sweep."""
import logging

from cli.context import ExperimentContext, collect, resolve_method
from cli.utils.validators import ConfigError, validate_grid
from metrics.estimators import evaluate_point, metric_bounds
from services.experiment_service import ExperimentService

logger = logging.getLogger(__name__)

COLUMNS = (
    'rate',
    'local', 'local_std_err',
    'global', 'global_std_err',
    'average_rate', 'average_rate_std_err',
    'local_bound', 'global_bound',
)


def tl_sweep(context: ExperimentContext, experiment: ExperimentService) -> int:
    """T_L, T_G и R̄ на сетке скоростей для одной конфигурации."""
    section = context.section
    errors: list[str] = []
    rates = collect(errors, validate_grid(section['rates'], 'tl-sweep.rates'))
    if errors:
        raise ConfigError(errors)
    method = resolve_method(section['method'], 'tl-sweep.method')

    metrics = evaluate_point(context.network, sorted(rates), context.streams, context.replicates, method)
    local_bound, global_bound = metric_bounds(context.network)
    rows = [
        (
            rate,
            local.value, local.std_error,
            global_.value, global_.std_error,
            average.value, average.std_error,
            local_bound.value, global_bound.value,
        )
        for rate, local, global_, average in zip(metrics.rates, metrics.local, metrics.global_, metrics.average_rate)
    ]
    logger.info(f"tl-sweep: {len(rows)} скоростей, p_M = {local_bound.value:.4f}")
    context.report(COLUMNS, rows, method=metrics.local[0].method.value, point_hash=metrics.config_hash)
    return 0
