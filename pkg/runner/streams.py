"""Счётчиковые генераторы случайных чисел для реплик Монте-Карло."""
import zlib
from dataclasses import dataclass

import numpy as np


def purpose_code(purpose: str) -> int:
    """Стабильный числовой код назначения потока (не зависит от PYTHONHASHSEED)."""
    return zlib.crc32(purpose.encode('utf-8'))


@dataclass(frozen=True)
class RandomStreams:
    """
    Семейство независимых потоков, выводимых из (seed, назначение, номер реплики).

    Генератор реплики i зависит только от тройки (seed, purpose, i), поэтому
    результат не зависит ни от порядка вычислений, ни от числа воркеров.
    """

    seed: int
    purpose: str = 'root'

    def child(self, name: str) -> 'RandomStreams':
        """Независимое семейство потоков для другой задачи."""
        return RandomStreams(self.seed, f'{self.purpose}/{name}')

    def replicate(self, index: int) -> np.random.Generator:
        """Генератор для реплики с номером index."""
        if index < 0:
            raise ValueError(f'Номер реплики должен быть неотрицательным: {index}')
        sequence = np.random.SeedSequence(
            entropy=self.seed,
            spawn_key=(purpose_code(self.purpose), index),
        )
        return np.random.Generator(np.random.PCG64(sequence))

    def generator(self) -> np.random.Generator:
        """Одиночный генератор для непараллельных задач (реплика 0)."""
        return self.replicate(0)
