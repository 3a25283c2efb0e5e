"""Популярность видео, кэширование, совпадения запросов и вероятность совпадения."""
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

PMF_TOLERANCE = 1e-12


def zipf_pmf(gamma: float, library_size: int) -> np.ndarray:
    """
    Распределение Ципфа p(v) = v^-gamma / Σ i^-gamma, v = 1..L.

    Returns:
        np.ndarray: Вектор длины L (индекс 0 соответствует самому популярному видео)
    """
    if library_size < 1:
        raise ValueError(f"Размер библиотеки должен быть не меньше 1: {library_size}")
    if gamma < 0:
        raise ValueError(f"Параметр Ципфа не может быть отрицательным: {gamma}")
    weights = np.arange(1, library_size + 1, dtype=float) ** -gamma
    return weights / weights.sum()


def _check_pmf(pmf: np.ndarray, library_size: int, name: str) -> np.ndarray:
    pmf = np.asarray(pmf, dtype=float)
    if pmf.shape != (library_size,):
        raise ValueError(f"{name}: ожидался вектор длины {library_size}, получено {pmf.shape}")
    if np.any(pmf < 0):
        raise ValueError(f"{name}: вероятности не могут быть отрицательными")
    if abs(pmf.sum() - 1.0) > PMF_TOLERANCE:
        raise ValueError(f"{name}: сумма вероятностей {pmf.sum()!r} отличается от 1")
    return pmf


@dataclass(frozen=True)
class ContentConfig:
    """Параметры библиотеки, кэшей и запросов."""

    library_size: int
    cache_size: int
    zipf_gamma: float = 0.6
    request_pmf: np.ndarray | None = field(default=None, repr=False, compare=False)
    cache_pmf: np.ndarray | None = field(default=None, repr=False, compare=False)

    def __post_init__(self):
        if self.library_size < 1:
            raise ValueError(f"Размер библиотеки должен быть положительным: {self.library_size}")
        if self.cache_size < 1:
            raise ValueError(f"Размер кэша должен быть положительным: {self.cache_size}")
        if self.request_pmf is None:
            if not 0 < self.zipf_gamma < 1:
                raise ValueError(f"Параметр Ципфа должен лежать в (0, 1): {self.zipf_gamma}")
            object.__setattr__(self, 'request_pmf', zipf_pmf(self.zipf_gamma, self.library_size))
        else:
            object.__setattr__(self, 'request_pmf', _check_pmf(self.request_pmf, self.library_size, 'p_V'))
        # Пользователи кэшируют то, что смотрят: по умолчанию p_A = p_V
        if self.cache_pmf is None:
            object.__setattr__(self, 'cache_pmf', self.request_pmf)
        else:
            object.__setattr__(self, 'cache_pmf', _check_pmf(self.cache_pmf, self.library_size, 'p_A'))

    def fingerprint(self) -> dict:
        """Описание для хеша конфигурации."""
        return {
            'library_size': self.library_size,
            'cache_size': self.cache_size,
            'zipf_gamma': self.zipf_gamma,
            'request_pmf': np.round(self.request_pmf, 15).tolist(),
            'cache_pmf': np.round(self.cache_pmf, 15).tolist(),
        }


def sample_caches(cfg: ContentConfig, users: int, rng: np.random.Generator) -> np.ndarray:
    """
    Кэши users пользователей: по M независимых видео из p_A (повторы допустимы).

    Returns:
        np.ndarray: Матрица (users, M) номеров видео от 1 до L
    """
    return rng.choice(cfg.library_size, size=(users, cfg.cache_size), p=cfg.cache_pmf) + 1


def sample_requests(cfg: ContentConfig, users: int, rng: np.random.Generator) -> np.ndarray:
    """Запросы users пользователей из p_V (номера видео от 1 до L)."""
    return rng.choice(cfg.library_size, size=users, p=cfg.request_pmf) + 1


def match_probability(cfg: ContentConfig, lambda_u: float, cluster_radius: float) -> float:
    """
    Вероятность того, что запрошенное видео есть хотя бы в одном кэше кластера.

    p_M = 1 - E_V[exp(-lambda_u·π·R_c²·(1 - (1 - p_A(V))^M))]
    """
    if lambda_u < 0:
        raise ValueError(f"Интенсивность не может быть отрицательной: {lambda_u}")
    if not cluster_radius > 0:
        raise ValueError(f"Радиус кластера должен быть положительным: {cluster_radius}")
    mean_users = lambda_u * np.pi * cluster_radius ** 2
    stored = -np.expm1(cfg.cache_size * np.log1p(-np.minimum(cfg.cache_pmf, 1.0)))
    value = 1.0 - float(np.dot(cfg.request_pmf, np.exp(-mean_users * stored)))
    return min(max(value, 0.0), 1.0)


def find_matches(requests: Sequence[int], caches: Sequence[Sequence[int]]) -> list[np.ndarray]:
    """
    Множества пользователей, хранящих запрошенное видео.

    Args:
        requests: Номера запрошенных видео
        caches: Кэши пользователей (по M видео на пользователя)

    Returns:
        list[np.ndarray]: Для каждого запроса номера пользователей (с нуля), у которых он есть
    """
    requests = np.asarray(requests, dtype=int).reshape(-1)
    caches = np.asarray(caches, dtype=int)
    if caches.size == 0:
        return [np.empty(0, dtype=int) for _ in requests]
    if caches.ndim == 1:
        caches = caches.reshape(-1, 1)
    membership = (caches[None, :, :] == requests[:, None, None]).any(axis=2)
    return [np.flatnonzero(row) for row in membership]


def match_count(match_sets: Sequence[np.ndarray]) -> int:
    """Число запросов с непустым множеством совпадений (N_m)."""
    return sum(1 for users in match_sets if len(users))


def sample_match_count(
    cfg: ContentConfig,
    caching_users: int,
    requesting_users: int,
    rng: np.random.Generator,
) -> int:
    """N_m без построения множеств совпадений (для оценки законов распределения)."""
    if caching_users == 0 or requesting_users == 0:
        return 0
    stored = np.unique(sample_caches(cfg, caching_users, rng))
    requests = sample_requests(cfg, requesting_users, rng)
    return int(np.isin(requests, stored).sum())
