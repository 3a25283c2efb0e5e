import numpy as np
import pytest

from database.repository import EvaluationRepository
from metrics.estimators import MetricEstimate, MetricMethod, PointMetrics
from runner.streams import RandomStreams
from tradeoff.optimizers import (
    GeometryPoint,
    SweepEvaluator,
    SweepGrid,
    optimize_global,
    optimize_local,
    optimize_local_global,
)

METHOD = MetricMethod.FULL_MONTE_CARLO
NEAR = GeometryPoint(10.0, 20.0, 1e-4)
FAR = GeometryPoint(20.0, 40.0, 1e-4)


class TableEvaluator:
    """Линейные по R метрики: T_L = a - b·R, R̄ = s·R, T_G = coverage·T_L."""

    method = METHOD

    def __init__(self):
        self.table = {
            NEAR: {'a': 0.8, 'b': 0.5, 'coverage': 0.1, 's': 0.9, 'density': 1e-3},
            FAR: {'a': 0.6, 'b': 0.1, 'coverage': 0.5, 's': 0.5, 'density': 2e-4},
        }

    def geometries(self, grid):
        return iter(self.table)

    def parent_density(self, point):
        return self.table[point]['density']

    def evaluate(self, point, rates):
        row = self.table[point]
        local = [MetricEstimate(row['a'] - row['b'] * r, 0.0, 10, METHOD) for r in rates]
        return PointMetrics(
            rates=np.asarray(rates),
            local=local,
            global_=[estimate.scaled(row['coverage']) for estimate in local],
            average_rate=[MetricEstimate(row['s'] * r, 0.0, 10, METHOD) for r in rates],
            served=local,
            config_hash='table',
        )


def _grid(**constraints) -> SweepGrid:
    return SweepGrid(cluster_radii=(10.0, 20.0), rates=(0.1, 1.0), lambdas=(1e-4,), **constraints)


def test_grid_validation():
    with pytest.raises(ValueError):
        SweepGrid(cluster_radii=(10.0,), rates=(0.1,), lambdas=(1e-4,), delta_ratios=(1.5,))
    with pytest.raises(ValueError):
        SweepGrid(cluster_radii=(), rates=(0.1,), lambdas=(1e-4,))
    with pytest.raises(ValueError):
        SweepGrid(cluster_radii=(10.0,), rates=(-0.1,), lambdas=(1e-4,))


def test_spaced_grid_axes():
    grid = SweepGrid.spaced((10.0, 60.0), (1e-3, 1.0), (1e-5, 1e-3), points=4, rate_floors=[0.0, 0.1])
    assert grid.cluster_radii == pytest.approx((10.0, 26.666666, 43.333333, 60.0))
    assert grid.rates == pytest.approx((1e-3, 1e-2, 1e-1, 1.0))
    assert grid.delta_ratios == (2.0,)
    assert grid.rate_floors == (0.0, 0.1)


def test_optimize_global_frontier():
    frontier = optimize_global(_grid(rate_floors=(0.0, 0.4, 0.6, 0.95)), TableEvaluator())
    assert [p.feasible for p in frontier] == [True, True, True, False]
    assert [p.objective.value for p in frontier[:3]] == pytest.approx([0.295, 0.25, 0.03])
    assert frontier[0].parameters == {'cluster_radius': 20.0, 'delta': 40.0, 'lam': 1e-4, 'rate': 0.1}
    assert frontier[3].objective.value == 0.0


def test_optimize_local_respects_density_floor():
    frontier = optimize_local(_grid(rate_floors=(0.4,), density_floors=(0.0, 5e-4)), TableEvaluator())
    assert [p.density_floor for p in frontier] == [0.0, 5e-4]
    assert [p.objective.value for p in frontier] == pytest.approx([0.5, 0.3])
    assert frontier[1].parameters['parent_density'] == pytest.approx(1e-3)


def test_optimize_local_global_frontier():
    frontier = optimize_local_global(_grid(local_floors=(0.0, 0.7, 0.9)), TableEvaluator(), rate=0.1)
    assert [p.feasible for p in frontier] == [True, True, False]
    assert [p.objective.value for p in frontier[:2]] == pytest.approx([0.295, 0.075])
    assert frontier[1].parameters['local'] == pytest.approx(0.75)
    with pytest.raises(ValueError):
        optimize_local_global(_grid(), TableEvaluator(), rate=-1.0)


def test_evaluator_geometries(small_cfg, grid_cfg):
    grid = SweepGrid(cluster_radii=(10.0, 15.0), rates=(0.1,), lambdas=(1e-4, 1e-3), delta_ratios=(2.0, 3.0))
    matern = list(SweepEvaluator(small_cfg, RandomStreams(0), 10).geometries(grid))
    assert len(matern) == 8
    assert GeometryPoint(15.0, 45.0, 1e-3) in matern
    lattice = list(SweepEvaluator(grid_cfg, RandomStreams(0), 10).geometries(grid))
    assert len(lattice) == 4
    assert all(point.lam is None for point in lattice)


def test_evaluator_reuses_stored_points(small_cfg, session):
    repository = EvaluationRepository(session)
    point = GeometryPoint(15.0, 40.0, 2e-4)
    first = SweepEvaluator(small_cfg, RandomStreams(3, 'tradeoff'), 30, METHOD, repository)
    computed = first.evaluate(point, (0.05, 0.5))
    assert first.evaluate(point, (0.05, 0.5)) is computed

    config_hash = first.config_for(point).config_hash()
    assert len(repository.get(config_hash, 3, 30, METHOD.value)) == 2

    second = SweepEvaluator(small_cfg, RandomStreams(3, 'tradeoff'), 30, METHOD, repository)
    loaded = second.evaluate(point, (0.05, 0.5))
    assert [e.value for e in loaded.local] == [e.value for e in computed.local]
    assert [e.value for e in loaded.average_rate] == [e.value for e in computed.average_rate]
