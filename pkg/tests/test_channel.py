import math

import numpy as np
import pytest

from channel.models import (
    ChannelKind,
    ChannelModel,
    inter_cluster_gain,
    inter_cluster_loss_db,
    intra_cluster_gain,
    intra_cluster_loss_db,
    los_probability,
    path_loss,
    penetration_counts,
    wall_count,
)
from geometry.point_processes import ParentKind, ParentProcess


def test_path_loss_power_law():
    model = ChannelModel(alpha=4.0, c_tilde=2.0)
    assert path_loss(2.0, model) == pytest.approx(2.0 / 16.0)
    assert np.allclose(path_loss(np.array([1.0, 10.0]), model), [2.0, 2e-4])


def test_path_loss_rejects_zero_distance():
    with pytest.raises(ValueError):
        path_loss(0.0, ChannelModel())


def test_channel_model_requires_alpha_above_two():
    with pytest.raises(ValueError):
        ChannelModel(alpha=2.0)


def test_los_probability_bounds():
    assert los_probability(3.0) == 1.0
    values = los_probability(np.linspace(5.5, 200.0, 50))
    assert np.all((values >= 0.0) & (values <= 1.0))
    assert los_probability(10.0) > los_probability(40.0)
    assert los_probability(10.0) == pytest.approx(0.1823, abs=1e-3)
    assert los_probability(100.0) == pytest.approx(0.1, abs=1e-4)


def test_wall_count():
    assert wall_count(12.0, True) == 0
    assert wall_count(3.0, False) == 1
    assert wall_count(12.0, False) == 2
    assert wall_count(np.array([4.0, 26.0]), np.array([False, False])).tolist() == [1, 5]


def test_intra_cluster_loss_los():
    model = ChannelModel(kind=ChannelKind.WINNER_LOGNORMAL)
    expected = 18.7 * 1.0 + 46.8 + 20.0 * math.log10(2.45 / 5.0)
    assert intra_cluster_loss_db(10.0, True, 0.0, model) == pytest.approx(expected)


def test_intra_cluster_loss_nlos_counts_walls():
    model = ChannelModel(kind=ChannelKind.WINNER_LOGNORMAL)
    expected = 36.8 * 1.0 + 43.8 + 23.0 * math.log10(2.45 / 5.0) + 5.0 * 2
    assert intra_cluster_loss_db(10.0, False, 0.0, model) == pytest.approx(expected)


def test_inter_cluster_loss_example():
    model = ChannelModel(kind=ChannelKind.WINNER_LOGNORMAL)
    # 100 м на 2.45 ГГц без потерь на проникновение
    assert inter_cluster_loss_db(100.0, 0, 0.0, model) == pytest.approx(113.97, abs=0.01)
    assert inter_cluster_loss_db(100.0, 2, 3.0, model) == pytest.approx(113.9674 + 56.0 + 3.0, abs=1e-3)


def test_winner_transmit_power_from_link_budget():
    assert ChannelModel(kind=ChannelKind.WINNER_LOGNORMAL).transmit_power == pytest.approx(10 ** 3.2)
    assert ChannelModel(power=2.5).transmit_power == 2.5


def test_rayleigh_gain_mean_matches_path_loss(rng):
    model = ChannelModel()
    x = np.zeros((20000, 2))
    y = np.tile([10.0, 0.0], (20000, 1))
    gains = inter_cluster_gain(x, y, 1, rng, model)
    assert gains.mean() == pytest.approx(path_loss(10.0, model), rel=0.05)


def test_winner_gains_positive(rng):
    model = ChannelModel(kind=ChannelKind.WINNER_LOGNORMAL)
    x = np.zeros((100, 2))
    y = np.tile([15.0, 0.0], (100, 1))
    assert np.all(intra_cluster_gain(x, y, rng, model) > 0)
    assert np.all(inter_cluster_gain(x, y * 10, 1, rng, model) > 0)


def test_winner_inter_gain_requires_penetration(rng):
    model = ChannelModel(kind=ChannelKind.WINNER_LOGNORMAL)
    with pytest.raises(ValueError):
        inter_cluster_gain(np.zeros((1, 2)), np.ones((1, 2)), 0, rng, model)


def test_penetration_counts():
    centers = np.array([[100.0, 30.0], [20.0, 0.0], [-160.0, 140.0]])
    grid = ParentProcess(ParentKind.TRANSLATED_GRID, delta=50.0)
    assert penetration_counts(centers, grid).tolist() == [2, 1, 3]
    matern = ParentProcess(ParentKind.MATERN_II, delta=50.0, lam=1e-4)
    assert penetration_counts(centers, matern).tolist() == [1, 1, 1]
