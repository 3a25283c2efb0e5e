"""Ассоциативные накопители моментов и стандартная ошибка batch means."""
from dataclasses import dataclass
from typing import Iterable

import numpy as np

from config import config


@dataclass(frozen=True)
class RunningMoments:
    """Накопитель (count, sum, sum of squares) с ассоциативным слиянием."""

    count: int = 0
    total: float = 0.0
    total_sq: float = 0.0

    @classmethod
    def from_values(cls, values: Iterable[float]) -> 'RunningMoments':
        data = np.asarray(list(values) if not isinstance(values, np.ndarray) else values, dtype=float)
        return cls(int(data.size), float(np.sum(data)), float(np.sum(data * data)))

    def merge(self, other: 'RunningMoments') -> 'RunningMoments':
        return RunningMoments(
            self.count + other.count,
            self.total + other.total,
            self.total_sq + other.total_sq,
        )

    @property
    def mean(self) -> float:
        return self.total / self.count if self.count else 0.0

    @property
    def variance(self) -> float:
        """Несмещённая выборочная дисперсия."""
        if self.count < 2:
            return 0.0
        value = (self.total_sq - self.total * self.total / self.count) / (self.count - 1)
        return max(value, 0.0)

    @property
    def std_error(self) -> float:
        return float(np.sqrt(self.variance / self.count)) if self.count else 0.0


def pairwise_merge(parts: list[RunningMoments]) -> RunningMoments:
    """Слияние в фиксированном попарном порядке."""
    if not parts:
        return RunningMoments()
    layer = list(parts)
    while len(layer) > 1:
        merged = [layer[i].merge(layer[i + 1]) for i in range(0, len(layer) - 1, 2)]
        if len(layer) % 2:
            merged.append(layer[-1])
        layer = merged
    return layer[0]


def batch_means(values, batches: int | None = None) -> tuple[float, float]:
    """
    Среднее и стандартная ошибка по методу batch means.

    Реплики делятся на batches смежных групп в порядке номеров; при нехватке
    реплик каждая реплика становится отдельной группой.

    Returns:
        tuple[float, float]: (среднее, стандартная ошибка)
    """
    data = np.asarray(values, dtype=float)
    if data.size == 0:
        return 0.0, 0.0
    batches = batches or config.BATCH_COUNT
    if data.size < 2 * batches:
        moments = RunningMoments.from_values(data)
        return moments.mean, moments.std_error

    groups = np.array_split(data, batches)
    parts = [RunningMoments.from_values(group) for group in groups]
    overall = pairwise_merge(parts)
    group_means = RunningMoments.from_values([part.mean for part in parts])
    return overall.mean, group_means.std_error


def ratio_estimate(numerators, denominators, batches: int | None = None) -> tuple[float, float]:
    """
    Отношение сумм Σ num / Σ den и его стандартная ошибка по группам.

    Группы те же, что в batch_means; группы с нулевым знаменателем пропускаются.
    """
    num = np.asarray(numerators, dtype=float)
    den = np.asarray(denominators, dtype=float)
    if num.shape != den.shape:
        raise ValueError("Числители и знаменатели должны иметь одинаковую длину")
    if den.sum() <= 0:
        return 0.0, 0.0
    value = float(num.sum() / den.sum())
    batches = batches or config.BATCH_COUNT
    groups = min(batches, num.size)
    ratios = [
        n.sum() / d.sum()
        for n, d in zip(np.array_split(num, groups), np.array_split(den, groups))
        if d.sum() > 0
    ]
    return value, RunningMoments.from_values(ratios).std_error
