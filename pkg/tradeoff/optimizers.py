"""Перебор по сетке параметров: внутренние границы трёх областей компромисса."""
import itertools
import logging
from dataclasses import dataclass, field
from typing import Iterator

import numpy as np

from cluster.network_config import NetworkConfig
from database.repository import EvaluationRepository
from geometry.point_processes import ParentKind, matern_ii_density
from metrics.estimators import MetricEstimate, MetricMethod, PointMetrics, default_method, evaluate_point
from runner.streams import RandomStreams

logger = logging.getLogger(__name__)

DEFAULT_POINTS = 12
SAFETY_MARGIN = 3.0


@dataclass(frozen=True)
class SweepGrid:
    """
    Оси перебора и значения ограничений.

    Ось delta задаётся отношением delta / R_c >= 2, поэтому каждая пара
    (R_c, delta) допустима. Для решётки ось lambdas не используется.
    """

    cluster_radii: tuple[float, ...]
    rates: tuple[float, ...]
    lambdas: tuple[float, ...]
    delta_ratios: tuple[float, ...] = (2.0,)
    rate_floors: tuple[float, ...] = (0.0,)
    density_floors: tuple[float, ...] = (0.0,)
    local_floors: tuple[float, ...] = (0.0,)

    def __post_init__(self):
        for name in ('cluster_radii', 'rates', 'lambdas', 'delta_ratios',
                     'rate_floors', 'density_floors', 'local_floors'):
            values = tuple(float(v) for v in getattr(self, name))
            if not values:
                raise ValueError(f"Ось {name} не может быть пустой")
            object.__setattr__(self, name, values)
        if min(self.delta_ratios) < 2.0:
            raise ValueError(f"Отношение delta / R_c должно быть не меньше 2: {min(self.delta_ratios)}")
        if min(self.cluster_radii) <= 0 or min(self.lambdas) <= 0:
            raise ValueError("Радиусы и интенсивности должны быть положительными")
        if min(self.rates) < 0:
            raise ValueError("Скорости не могут быть отрицательными")

    @classmethod
    def spaced(
        cls,
        cluster_radius: tuple[float, float],
        rate: tuple[float, float],
        lam: tuple[float, float],
        delta_ratio: tuple[float, float] = (2.0, 2.0),
        points: int = DEFAULT_POINTS,
        **constraints,
    ) -> 'SweepGrid':
        """Сетка по диапазонам: линейная по R_c и delta/R_c, логарифмическая по R и lambda."""
        def axis(bounds, log: bool) -> tuple[float, ...]:
            low, high = bounds
            if low == high:
                return (float(low),)
            return tuple((np.geomspace if log else np.linspace)(low, high, points).tolist())

        return cls(
            cluster_radii=axis(cluster_radius, log=False),
            rates=axis(rate, log=True),
            lambdas=axis(lam, log=True),
            delta_ratios=axis(delta_ratio, log=False),
            **{key: tuple(value) for key, value in constraints.items()},
        )


@dataclass(frozen=True)
class GeometryPoint:
    cluster_radius: float
    delta: float
    lam: float | None

    def as_dict(self) -> dict:
        return {'cluster_radius': self.cluster_radius, 'delta': self.delta, 'lam': self.lam}


@dataclass(frozen=True)
class TradeoffPoint:
    """Оптимум при одном значении ограничения."""

    constraint: float
    objective: MetricEstimate
    parameters: dict = field(default_factory=dict)
    feasible: bool = True
    density_floor: float = 0.0


class SweepEvaluator:
    """
    Вычисление метрик в точках сетки с мемоизацией.

    Каждая геометрия (R_c, delta, lambda) оценивается один раз для всех
    скоростей; при наличии репозитория оценки сохраняются в базе и
    переиспользуются повторными запусками с тем же seed.
    """

    def __init__(
        self,
        cfg: NetworkConfig,
        streams: RandomStreams,
        replicates: int,
        method: MetricMethod | None = None,
        repository: EvaluationRepository | None = None,
        run_id: int | None = None,
    ):
        self.cfg = cfg
        self.streams = streams
        self.replicates = replicates
        self.method = MetricMethod(method) if method is not None else default_method(cfg)
        self.repository = repository
        self.run_id = run_id
        self._memo: dict[tuple[GeometryPoint, tuple[float, ...]], PointMetrics] = {}

    def geometries(self, grid: SweepGrid) -> Iterator[GeometryPoint]:
        lambdas = grid.lambdas if self.cfg.parent.kind == ParentKind.MATERN_II else (None,)
        for radius, ratio, lam in itertools.product(grid.cluster_radii, grid.delta_ratios, lambdas):
            yield GeometryPoint(radius, ratio * radius, lam)

    def config_for(self, point: GeometryPoint) -> NetworkConfig:
        return self.cfg.with_geometry(point.cluster_radius, point.delta, point.lam)

    def parent_density(self, point: GeometryPoint) -> float:
        if point.lam is None:
            return point.delta ** -2
        return matern_ii_density(point.lam, point.delta)

    def evaluate(self, point: GeometryPoint, rates: tuple[float, ...]) -> PointMetrics:
        """Метрики точки для набора скоростей."""
        key = (point, rates)
        if key in self._memo:
            return self._memo[key]

        cfg = self.config_for(point)
        config_hash = cfg.config_hash()
        metrics = self._load(cfg, config_hash, rates)
        if metrics is None:
            # Общие случайные числа для всех ограничений и повторных запусков
            metrics = evaluate_point(cfg, list(rates), self.streams.child(config_hash),
                                     self.replicates, self.method)
            self._store(config_hash, metrics)
        self._memo[key] = metrics
        return metrics

    def _load(self, cfg: NetworkConfig, config_hash: str, rates: tuple[float, ...]) -> PointMetrics | None:
        if self.repository is None:
            return None
        rows = {
            row.rate: row
            for row in self.repository.get(config_hash, self.streams.seed, self.replicates, self.method.value)
        }
        if not all(rate in rows for rate in rates):
            return None
        coverage = cfg.parent_density * cfg.cluster_area
        local, global_, average, served = [], [], [], []
        for rate in rates:
            row = rows[rate]
            estimate = MetricEstimate(row.local_value, row.local_std_error, self.replicates, self.method)
            local.append(estimate)
            global_.append(estimate.scaled(coverage))
            average.append(MetricEstimate(row.average_rate_value, row.average_rate_std_error,
                                          row.average_rate_replicates, self.method))
            served.append(MetricEstimate(row.served_value, row.served_std_error, self.replicates, self.method))
        logger.debug(f"Точка {config_hash} взята из базы")
        return PointMetrics(np.array(rates), local, global_, average, served, config_hash)

    def _store(self, config_hash: str, metrics: PointMetrics) -> None:
        if self.repository is None:
            return
        records = [
            {
                'rate': float(rate),
                'local_value': local.value,
                'local_std_error': local.std_error,
                'average_rate_value': average.value,
                'average_rate_std_error': average.std_error,
                'average_rate_replicates': average.replicates,
                'served_value': served.value,
                'served_std_error': served.std_error,
            }
            for rate, local, average, served in zip(metrics.rates, metrics.local, metrics.average_rate, metrics.served)
        ]
        self.repository.put(config_hash, self.streams.seed, self.replicates, self.method.value, records, self.run_id)


def _meets(estimate: MetricEstimate, floor: float) -> bool:
    """Ограничение с запасом в SAFETY_MARGIN стандартных ошибок; нулевой порог не ограничивает."""
    return floor <= 0 or estimate.lower(SAFETY_MARGIN) >= floor


def _infeasible(constraint: float, method: MetricMethod, density_floor: float = 0.0) -> TradeoffPoint:
    return TradeoffPoint(
        constraint=constraint,
        objective=MetricEstimate(0.0, 0.0, 0, method),
        feasible=False,
        density_floor=density_floor,
    )


def _best(candidates: list[tuple[MetricEstimate, dict]], constraint: float, method: MetricMethod,
          density_floor: float = 0.0) -> TradeoffPoint:
    if not candidates:
        return _infeasible(constraint, method, density_floor)
    objective, parameters = max(candidates, key=lambda item: item[0].value)
    return TradeoffPoint(constraint, objective, parameters, True, density_floor)


def _rate_candidates(evaluator: SweepEvaluator, grid: SweepGrid, density_floor: float = 0.0):
    """Все (точка, скорость) с T_L, T_G и R̄, удовлетворяющие порогу плотности."""
    for point in evaluator.geometries(grid):
        if density_floor > 0 and evaluator.parent_density(point) < density_floor:
            continue
        metrics = evaluator.evaluate(point, grid.rates)
        for index, rate in enumerate(grid.rates):
            yield point, rate, metrics.local[index], metrics.global_[index], metrics.average_rate[index]


def optimize_global(grid: SweepGrid, evaluator: SweepEvaluator) -> list[TradeoffPoint]:
    """
    max T_G по (R_c, R, lambda, delta) при R̄ >= r для каждого r.

    Returns:
        list[TradeoffPoint]: Фронт (r, max T_G) в порядке grid.rate_floors
    """
    evaluated = list(_rate_candidates(evaluator, grid))
    frontier = []
    for floor in grid.rate_floors:
        candidates = [
            (global_, point.as_dict() | {'rate': rate})
            for point, rate, _, global_, average in evaluated
            if _meets(average, floor)
        ]
        frontier.append(_best(candidates, floor, evaluator.method))
    logger.info(f"Глобальный фронт: {sum(p.feasible for p in frontier)} из {len(frontier)} точек допустимы")
    return frontier


def optimize_local(grid: SweepGrid, evaluator: SweepEvaluator) -> list[TradeoffPoint]:
    """
    max T_L при R̄ >= r и lambda_p(delta, lambda) >= lambda_l.

    Returns:
        list[TradeoffPoint]: Фронт для каждой пары (lambda_l, r)
    """
    frontier = []
    for density_floor in grid.density_floors:
        evaluated = list(_rate_candidates(evaluator, grid, density_floor))
        for floor in grid.rate_floors:
            candidates = [
                (local, point.as_dict() | {'rate': rate, 'parent_density': evaluator.parent_density(point)})
                for point, rate, local, _, average in evaluated
                if _meets(average, floor)
            ]
            frontier.append(_best(candidates, floor, evaluator.method, density_floor))
    logger.info(f"Локальный фронт: {sum(p.feasible for p in frontier)} из {len(frontier)} точек допустимы")
    return frontier


def optimize_local_global(grid: SweepGrid, evaluator: SweepEvaluator, rate: float) -> list[TradeoffPoint]:
    """
    max T_G по (R_c, lambda, delta) при фиксированной скорости R и T_L >= t_c.

    Returns:
        list[TradeoffPoint]: Фронт (t_c, max T_G) в порядке grid.local_floors
    """
    if rate < 0:
        raise ValueError(f"Скорость не может быть отрицательной: {rate}")
    evaluated = [
        (point, evaluator.evaluate(point, (float(rate),)))
        for point in evaluator.geometries(grid)
    ]
    frontier = []
    for floor in grid.local_floors:
        candidates = [
            (metrics.global_[0], point.as_dict() | {'rate': rate, 'local': metrics.local[0].value})
            for point, metrics in evaluated
            if _meets(metrics.local[0], floor)
        ]
        frontier.append(_best(candidates, floor, evaluator.method))
    logger.info(f"Локально-глобальный фронт при R={rate:g}: {len(frontier)} точек")
    return frontier
