import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from geometry.point_processes import (
    ParentKind,
    ParentProcess,
    PointSet,
    Window,
    matern_ii_density,
    sample_matern_ii,
    sample_palm_parents,
    sample_parents,
    sample_poisson_pp,
    sample_translated_grid,
    sample_uniform_disc,
)


def test_window_rejects_nonpositive_radius():
    with pytest.raises(ValueError):
        Window(0.0)


def test_window_contains_and_dilated():
    window = Window(10.0, center=(5.0, 0.0))
    mask = window.contains(np.array([[5.0, 0.0], [15.0, 0.0], [16.0, 0.0]]))
    assert mask.tolist() == [True, True, False]
    assert window.dilated(2.0).radius == 12.0
    assert window.area == pytest.approx(100 * math.pi)


def test_matern_requires_lambda():
    with pytest.raises(ValueError):
        ParentProcess(ParentKind.MATERN_II, delta=10.0)


def test_uniform_disc_stays_inside(rng):
    points = sample_uniform_disc(500, 3.0, rng)
    assert points.shape == (500, 2)
    assert np.all(np.hypot(points[:, 0], points[:, 1]) <= 3.0)


def test_poisson_zero_intensity_is_empty(rng):
    assert len(sample_poisson_pp(0.0, Window(10.0), rng)) == 0
    with pytest.raises(ValueError):
        sample_poisson_pp(-1.0, Window(10.0), rng)


def test_matern_density_formula():
    delta, lam = 10.0, 0.01
    disc = math.pi * delta ** 2
    assert matern_ii_density(lam, delta) == pytest.approx((1 - math.exp(-lam * disc)) / disc)
    assert matern_ii_density(0.0, delta) == 0.0


@given(
    lam=st.floats(min_value=1e-8, max_value=10.0),
    delta=st.floats(min_value=0.1, max_value=1e3),
)
def test_matern_density_below_intensity_and_packing(lam, delta):
    density = matern_ii_density(lam, delta)
    assert 0 < density <= lam * (1 + 1e-12)
    assert density <= 1 / (math.pi * delta ** 2) * (1 + 1e-12)


def test_matern_is_hard_core(rng):
    proc = ParentProcess(ParentKind.MATERN_II, delta=10.0, lam=0.05)
    points = sample_matern_ii(proc, Window(100.0), rng)
    assert len(points) > 10
    assert points.min_pairwise_distance() > proc.delta


def test_translated_grid_spacing(rng):
    points = sample_translated_grid(5.0, Window(30.0), rng)
    assert points.min_pairwise_distance() == pytest.approx(5.0)
    assert np.all(Window(30.0).contains(points.points))


def test_sample_parents_dispatches_on_kind(rng):
    grid = sample_parents(ParentProcess(ParentKind.TRANSLATED_GRID, delta=5.0), Window(20.0), rng)
    offsets = np.mod(grid.points - grid.points[0], 5.0)
    assert np.allclose(np.minimum(offsets, 5.0 - offsets), 0.0, atol=1e-9)


def test_palm_grid_is_unshifted_lattice_without_origin(rng):
    points = sample_palm_parents(ParentProcess(ParentKind.TRANSLATED_GRID, delta=10.0), Window(25.0), rng).points
    assert not np.any(np.all(points == 0.0, axis=1))
    assert np.allclose(points / 10.0, np.rint(points / 10.0))
    # Узлы (m, n) с m² + n² <= 6.25 без начала координат
    assert len(points) == 20


def test_palm_matern_keeps_clearance_from_origin(rng):
    proc = ParentProcess(ParentKind.MATERN_II, delta=10.0, lam=0.02)
    for _ in range(20):
        points = sample_palm_parents(proc, Window(60.0), rng).points
        assert np.all(np.hypot(points[:, 0], points[:, 1]) > proc.delta)
        assert PointSet(np.vstack((points, [[0.0, 0.0]]))).min_pairwise_distance() > proc.delta


def test_palm_matern_dense_process_keeps_clearance(rng):
    delta = 10.0
    proc = ParentProcess(ParentKind.MATERN_II, delta=delta, lam=10.0 / (math.pi * delta ** 2))
    for _ in range(20):
        points = sample_palm_parents(proc, Window(50.0), rng).points
        assert len(points) > 0
        assert np.all(np.hypot(points[:, 0], points[:, 1]) > delta)
        assert PointSet(np.vstack((points, [[0.0, 0.0]]))).min_pairwise_distance() > delta


def test_palm_matern_requires_centred_window(rng):
    proc = ParentProcess(ParentKind.MATERN_II, delta=10.0, lam=0.02)
    with pytest.raises(ValueError):
        sample_palm_parents(proc, Window(60.0, center=(5.0, 0.0)), rng)


@pytest.mark.slow
@pytest.mark.parametrize('lam_disc', [0.5, 2.0, 10.0])
def test_matern_empirical_density(lam_disc):
    delta = 10.0
    proc = ParentProcess(ParentKind.MATERN_II, delta=delta, lam=lam_disc / (math.pi * delta ** 2))
    window = Window(30 * delta)
    rng = np.random.default_rng(11)
    counts = [len(sample_matern_ii(proc, window, rng)) for _ in range(200)]
    empirical = np.mean(counts) / window.area
    assert empirical == pytest.approx(proc.density, rel=0.01)
