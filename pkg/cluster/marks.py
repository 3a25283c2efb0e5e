"""Метки кластера и стратегия распределения слотов TDMA."""
import logging
from dataclasses import dataclass, field, replace

import numpy as np

from cluster.network_config import NetworkConfig
from content.popularity import (
    find_matches,
    match_count,
    sample_caches,
    sample_match_count,
    sample_requests,
)
from geometry.point_processes import sample_uniform_disc
from runner.streams import RandomStreams

logger = logging.getLogger(__name__)

MAX_MATCHES_TAIL = 1e-3
MAX_MATCHES_REPLICATES = 10_000


@dataclass
class ClusterMarks:
    """Вектор меток одного кластера."""

    center: np.ndarray
    caching_positions: np.ndarray
    requesting_positions: np.ndarray
    caches: np.ndarray
    requests: np.ndarray
    match_sets: list[np.ndarray] = field(default_factory=list)

    @property
    def n_caching(self) -> int:
        return self.caching_positions.shape[0]

    @property
    def n_requesting(self) -> int:
        return self.requesting_positions.shape[0]

    @property
    def n_matched(self) -> int:
        return match_count(self.match_sets)

    @property
    def matched_requests(self) -> np.ndarray:
        """Номера запросов с непустым множеством совпадений."""
        return np.array([i for i, users in enumerate(self.match_sets) if len(users)], dtype=int)


@dataclass
class SlotPlan:
    """Результат стратегии: число слотов, назначения и отброшенные запросы."""

    slots: int
    # Для каждого слота (передатчик, приёмник) или None, если слот пуст
    assignments: list[tuple[int, int] | None] = field(default_factory=list)
    dropped: frozenset[int] = frozenset()

    @property
    def scheduled(self) -> list[tuple[int, int, int]]:
        """Список (слот, передатчик, приёмник) для занятых слотов."""
        return [(slot, *pair) for slot, pair in enumerate(self.assignments) if pair is not None]

    @property
    def occupied(self) -> int:
        return sum(1 for pair in self.assignments if pair is not None)


def sample_cluster(cfg: NetworkConfig, center, rng: np.random.Generator) -> ClusterMarks:
    """
    Разыграть метки кластера с центром center.

    N_u ~ Poisson(lambda_u·π·R_c²), N_r ~ Poisson(lambda_r·π·R_c²), положения
    равномерны в круге, кэши и запросы по модели контента.
    """
    n_caching = rng.poisson(cfg.lambda_u * cfg.cluster_area)
    n_requesting = rng.poisson(cfg.lambda_r * cfg.cluster_area)
    caching_positions = sample_uniform_disc(n_caching, cfg.cluster_radius, rng)
    requesting_positions = sample_uniform_disc(n_requesting, cfg.cluster_radius, rng)
    caches = sample_caches(cfg.content, n_caching, rng)
    requests = sample_requests(cfg.content, n_requesting, rng)
    return ClusterMarks(
        center=np.asarray(center, dtype=float),
        caching_positions=caching_positions,
        requesting_positions=requesting_positions,
        caches=caches,
        requests=requests,
        match_sets=find_matches(requests, caches),
    )


def slot_count(n_matched: int, eps: float) -> int:
    """
    Число слотов W(N_m, eps).

    W_L = 2^floor(log2 N_m), W_H = 2^ceil(log2 N_m); берётся W_L, если
    (N_m - W_L)/(W_H - W_L) < eps, иначе W_H. Для степени двойки W = N_m.
    """
    if n_matched <= 0:
        raise ValueError(f"Число совпадений должно быть положительным: {n_matched}")
    low = 1 << (int(n_matched).bit_length() - 1)
    if low == n_matched:
        return low
    high = low << 1
    return low if (n_matched - low) / (high - low) < eps else high


def schedule(marks: ClusterMarks, eps: float, n_m_max: int, rng: np.random.Generator) -> SlotPlan:
    """
    Распределить совпавшие запросы по слотам.

    Лишние запросы сверх n_m_max и N_m - W_L запросов при W = W_L отбрасываются
    случайно; остальные равномерно переставляются по слотам, передатчик каждого
    запроса выбирается равномерно из его множества совпадений.
    """
    matched = marks.matched_requests
    if matched.size == 0:
        return SlotPlan(slots=0)

    dropped: set[int] = set()
    if matched.size > n_m_max:
        kept = rng.choice(matched, size=n_m_max, replace=False)
        dropped.update(int(i) for i in np.setdiff1d(matched, kept))
        matched = np.sort(kept)

    slots = slot_count(matched.size, eps)
    if slots >= matched.size:
        chosen_slots = np.sort(rng.choice(slots, size=matched.size, replace=False))
        receivers = rng.permutation(matched)
    else:
        kept = rng.choice(matched, size=slots, replace=False)
        dropped.update(int(i) for i in np.setdiff1d(matched, kept))
        chosen_slots = np.arange(slots)
        receivers = rng.permutation(kept)

    assignments: list[tuple[int, int] | None] = [None] * slots
    for slot, receiver in zip(chosen_slots, receivers):
        transmitter = int(rng.choice(marks.match_sets[receiver]))
        assignments[int(slot)] = (transmitter, int(receiver))
    return SlotPlan(slots=slots, assignments=assignments, dropped=frozenset(dropped))


def match_count_replicate(cfg: NetworkConfig, rng: np.random.Generator, index: int) -> int:
    n_caching = rng.poisson(cfg.lambda_u * cfg.cluster_area)
    n_requesting = rng.poisson(cfg.lambda_r * cfg.cluster_area)
    return sample_match_count(cfg.content, n_caching, n_requesting, rng)


def sample_match_counts(cfg: NetworkConfig, replicates: int, streams: RandomStreams) -> np.ndarray:
    """Выборка N_m по независимым кластерам."""
    return np.array([
        match_count_replicate(cfg, streams.replicate(index), index) for index in range(replicates)
    ], dtype=int)


def estimate_max_matches(
    cfg: NetworkConfig,
    streams: RandomStreams,
    replicates: int = MAX_MATCHES_REPLICATES,
    tail: float = MAX_MATCHES_TAIL,
) -> int:
    """
    Наименьшая степень двойки n_m_max с P(N_m > n_m_max) < tail.

    Returns:
        int: Оценка n_m_max по предварительному прогону
    """
    counts = sample_match_counts(cfg, replicates, streams.child('max-matches'))
    n_max = 1
    while np.mean(counts > n_max) >= tail:
        n_max <<= 1
    logger.debug(f"n_m_max = {n_max} (максимум в выборке {counts.max(initial=0)})")
    return n_max


def resolve_max_matches(cfg: NetworkConfig, streams: RandomStreams) -> NetworkConfig:
    """Копия конфигурации с определённым n_m_max."""
    if cfg.n_m_max is not None:
        return cfg
    return replace(cfg, n_m_max=estimate_max_matches(cfg, streams))
