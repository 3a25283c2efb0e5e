from dataclasses import replace

import numpy as np
import pytest

from channel.models import ChannelKind, ChannelModel
from cluster.marks import sample_cluster, schedule
from content.popularity import match_probability
from geometry.point_processes import ParentKind, ParentProcess, Window
from interference.laplace import SlotCountLaw, estimate_slot_count_law, lt_interference_approx
from metrics.estimators import (
    ClusterSample,
    MetricEstimate,
    MetricMethod,
    _laplace_lookup,
    average_rate,
    default_method,
    evaluate_point,
    global_metric,
    link_positions,
    local_metric,
    metric_bounds,
    origin_cluster_replicate,
    sir_thresholds,
    success_probabilities,
)
from metrics.validation import campbell_identity_check, served_requests_oracle

RATES = [1e-6, 1e-3, 0.05, 0.3, 1.0]


def test_metric_estimate_helpers():
    estimate = MetricEstimate(0.5, 0.01, 100, MetricMethod.FULL_MONTE_CARLO)
    assert estimate.lower() == pytest.approx(0.47)
    assert estimate.scaled(-2.0).std_error == pytest.approx(0.02)
    with pytest.raises(ValueError):
        MetricEstimate(0.5, -0.1, 1, MetricMethod.CLOSED_FORM)


def test_default_method_follows_channel(small_cfg, winner_cfg):
    assert default_method(small_cfg) == MetricMethod.LT_RAYLEIGH
    assert default_method(winner_cfg) == MetricMethod.FULL_MONTE_CARLO


def test_metric_bounds(small_cfg):
    local, global_ = metric_bounds(small_cfg)
    p_match = match_probability(small_cfg.content, small_cfg.lambda_u, small_cfg.cluster_radius)
    assert local.value == pytest.approx(p_match)
    assert global_.value == pytest.approx(p_match * small_cfg.parent_density * small_cfg.cluster_area)
    assert local.method == MetricMethod.CLOSED_FORM


def test_sir_thresholds():
    thresholds = sir_thresholds([1, 4], [0.0, 1.0])
    assert thresholds.tolist() == pytest.approx([[0.0, 1.0], [0.0, 15.0]])


def test_link_positions_follow_schedule(small_cfg, rng):
    marks = sample_cluster(small_cfg, (0.0, 0.0), rng)
    plan = schedule(marks, small_cfg.eps, small_cfg.n_m_max, rng)
    tx, rx = link_positions(marks, plan)
    assert tx.shape == rx.shape == (plan.occupied, 2)


def test_origin_replicate_shapes(small_cfg, rng):
    law = SlotCountLaw(np.array([0.5, 0.5]))
    for method in (MetricMethod.LT_RAYLEIGH, MetricMethod.FULL_MONTE_CARLO):
        sample = origin_cluster_replicate(small_cfg, law, method, rng, 0)
        assert sample.signal.size == sample.interference.size == sample.radius.size == sample.links
        assert np.all(sample.radius <= small_cfg.cluster_radius)
        if method == MetricMethod.FULL_MONTE_CARLO:
            assert np.all(sample.interference >= 0)


def test_rayleigh_success_probability_formula(small_cfg):
    sample = ClusterSample(
        requests=1, slots=2,
        signal=np.array([2.0]), interference=np.array([0.5]), radius=np.array([1.0]),
    )
    success = success_probabilities([sample], [0.5], small_cfg, SlotCountLaw(np.array([1.0])),
                                    MetricMethod.FULL_MONTE_CARLO)
    theta = 2.0 ** (2 * 0.5) - 1.0
    assert success[0, 0] == pytest.approx(np.exp(-theta * 0.5 / 2.0))


def test_winner_success_is_indicator(winner_cfg):
    sample = ClusterSample(
        requests=2, slots=1,
        signal=np.array([3.0, 0.5]), interference=np.array([1.0, 1.0]), radius=np.array([1.0, 2.0]),
    )
    success = success_probabilities([sample], [1.0], winner_cfg, SlotCountLaw(np.array([1.0])),
                                    MetricMethod.FULL_MONTE_CARLO)
    assert success[:, 0].tolist() == [1.0, 0.0]


def test_laplace_lookup_matches_direct_quadrature(small_cfg):
    law = SlotCountLaw(np.array([0.2, 0.3, 0.3, 0.2]), empty_probability=0.1)
    etas = np.array([1e5, 1e6, 3e6, 1e7, 3e7])
    radii = np.array([0.0, 3.7, 11.2, 17.9, 20.0])
    table = _laplace_lookup(small_cfg, law, 2, etas, radii)
    direct = lt_interference_approx(etas, np.column_stack((radii, np.zeros_like(radii))), 2, small_cfg, law)
    assert np.max(np.abs(table - direct)) <= 2e-3


def test_evaluate_point_rejects_unsupported_methods(small_cfg, winner_cfg, streams):
    with pytest.raises(ValueError):
        evaluate_point(small_cfg, [0.1], streams, 10, MetricMethod.CLOSED_FORM)
    with pytest.raises(ValueError):
        evaluate_point(winner_cfg, [0.1], streams, 10, MetricMethod.LT_RAYLEIGH)
    with pytest.raises(ValueError):
        evaluate_point(small_cfg, [-0.1], streams, 10)


def test_evaluate_point_consistency(small_cfg, streams):
    point = evaluate_point(small_cfg, RATES, streams, 120, MetricMethod.FULL_MONTE_CARLO)
    coverage = small_cfg.parent_density * small_cfg.cluster_area
    local = np.array([estimate.value for estimate in point.local])
    assert np.all(np.diff(local) <= 1e-12)
    assert np.all((local >= 0) & (local <= 1.5))
    for t_local, t_global in zip(point.local, point.global_):
        assert t_global.value == pytest.approx(t_local.value * coverage)
    assert point.config_hash == small_cfg.config_hash()


def test_evaluate_point_deterministic(small_cfg, streams):
    first = evaluate_point(small_cfg, [0.01, 0.1], streams, 60)
    second = evaluate_point(small_cfg, [0.01, 0.1], streams, 60)
    assert [e.value for e in first.local] == [e.value for e in second.local]
    assert [e.value for e in first.average_rate] == [e.value for e in second.average_rate]


def test_single_rate_helpers_agree_with_point(small_cfg, streams):
    point = evaluate_point(small_cfg, [0.1], streams, 40, MetricMethod.FULL_MONTE_CARLO)
    kwargs = {'replicates': 40, 'method': MetricMethod.FULL_MONTE_CARLO}
    assert local_metric(small_cfg, 0.1, streams, **kwargs).value == point.local[0].value
    assert global_metric(small_cfg, 0.1, streams, **kwargs).value == point.global_[0].value
    assert average_rate(small_cfg, 0.1, streams, **kwargs).value == point.average_rate[0].value


def test_winner_point_scales_replicates(winner_cfg, streams):
    point = evaluate_point(winner_cfg, [0.01], streams, 40)
    assert 40 <= point.local[0].replicates <= 160
    assert 0.0 <= point.local[0].value <= 1.5


def test_low_rate_limit_reaches_match_probability(small_cfg, streams):
    cfg = replace(small_cfg, eps=0.0)
    point = evaluate_point(cfg, [1e-6], streams, 400, MetricMethod.FULL_MONTE_CARLO)
    p_match = match_probability(cfg.content, cfg.lambda_u, cfg.cluster_radius)
    estimate = point.local[0]
    assert abs(estimate.value - p_match) <= 4 * estimate.std_error + 1e-3


def test_oracle_runs_and_bounds(small_cfg, streams):
    oracle = served_requests_oracle(small_cfg, 0.05, streams, 60)
    assert 0.0 <= oracle.local.value <= 1.5
    assert 0.0 <= oracle.average_rate.value <= 0.05 + 1e-12


@pytest.mark.slow
def test_formula_matches_oracle(small_cfg, streams):
    law = estimate_slot_count_law(small_cfg, 2000, streams)
    oracle = served_requests_oracle(small_cfg, 0.05, streams.child('oracle'), 2000, law)
    formula = evaluate_point(small_cfg, [0.05], streams.child('formula'), 2000,
                             MetricMethod.FULL_MONTE_CARLO, law).local[0]
    error = np.hypot(oracle.local.std_error, formula.std_error)
    assert abs(oracle.local.value - formula.value) <= 4 * error


@pytest.mark.slow
def test_campbell_identity(small_cfg, streams):
    check = campbell_identity_check(small_cfg, 0.05, Window(4 * small_cfg.parent.delta), streams, 600)
    assert check.within(4.0)


def test_global_metric_limited_by_cluster_packing(small_cfg, streams):
    """При delta = 2R_c доля площади под кластерами не больше 1/4."""
    cfg = replace(
        small_cfg,
        parent=ParentProcess(ParentKind.MATERN_II, delta=40.0, lam=2e-3),
        lambda_u=0.02,
        eps=0.0,
        n_m_max=64,
    )
    point = evaluate_point(cfg, [1e-6, 0.05, 0.3], streams, 300)
    for estimate in point.global_:
        assert estimate.value <= 0.25 + 3 * estimate.std_error
    assert point.global_[0].value >= 0.23


@pytest.mark.slow
def test_winner_serves_more_than_rayleigh_on_grid(grid_cfg, streams):
    winner = replace(grid_cfg, channel=ChannelModel(kind=ChannelKind.WINNER_LOGNORMAL))
    rayleigh_point = evaluate_point(grid_cfg, [0.1, 1.0], streams, 300, MetricMethod.FULL_MONTE_CARLO)
    winner_point = evaluate_point(winner, [0.1, 1.0], streams, 300)
    for rayleigh, lognormal in zip(rayleigh_point.local, winner_point.local):
        error = np.hypot(rayleigh.std_error, lognormal.std_error)
        assert lognormal.value >= rayleigh.value - 3 * error
    high_rayleigh, high_winner = rayleigh_point.local[1], winner_point.local[1]
    assert high_winner.value - high_rayleigh.value > 3 * np.hypot(high_rayleigh.std_error, high_winner.std_error)
