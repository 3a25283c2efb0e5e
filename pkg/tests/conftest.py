"""Общие фикстуры тестов."""
from dataclasses import replace

import numpy as np
import pytest

from channel.models import ChannelKind, ChannelModel
from cluster.network_config import NetworkConfig
from content.popularity import ContentConfig
from database.base import create_session_maker
from geometry.point_processes import ParentKind, ParentProcess
from runner.streams import RandomStreams


@pytest.fixture
def rng() -> np.random.Generator:
    return np.random.default_rng(20240501)


@pytest.fixture
def streams() -> RandomStreams:
    return RandomStreams(7, 'tests')


@pytest.fixture
def content() -> ContentConfig:
    return ContentConfig(library_size=10, cache_size=2, zipf_gamma=0.6)


@pytest.fixture
def small_cfg(content) -> NetworkConfig:
    """Небольшая сеть: L=10, M=2, R_c=20, lambda_r = lambda_u = 0.01, окно 5·delta."""
    return NetworkConfig(
        parent=ParentProcess(ParentKind.MATERN_II, delta=40.0, lam=2e-4),
        cluster_radius=20.0,
        lambda_u=0.01,
        lambda_r=0.01,
        content=content,
        eps=0.05,
        n_m_max=32,
        window_factor=5.0,
    )


@pytest.fixture
def grid_cfg(small_cfg) -> NetworkConfig:
    return replace(small_cfg, parent=ParentProcess(ParentKind.TRANSLATED_GRID, delta=50.0))


@pytest.fixture
def winner_cfg(small_cfg) -> NetworkConfig:
    return replace(small_cfg, channel=ChannelModel(kind=ChannelKind.WINNER_LOGNORMAL))


@pytest.fixture
def session(tmp_path):
    """Сессия с пустой базой SQLite во временном каталоге."""
    maker = create_session_maker(f"sqlite:///{tmp_path / 'runs.db'}")
    with maker() as session:
        yield session
