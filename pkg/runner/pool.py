"""Пул воркеров для параллельного расчёта реплик Монте-Карло."""
import logging
from concurrent.futures import ProcessPoolExecutor
from functools import partial
from typing import Any, Callable

import numpy as np

from config import config
from runner.streams import RandomStreams

logger = logging.getLogger(__name__)

# Функция реплики: (генератор, номер реплики) -> результат
ReplicateFn = Callable[[np.random.Generator, int], Any]


def _run_batch(fn: ReplicateFn, streams: RandomStreams, indices: range) -> list:
    """Посчитать пакет реплик в одном процессе."""
    return [fn(streams.replicate(index), index) for index in indices]


class ReplicatePool:
    """
    Упорядоченный параллельный map по репликам.

    Результаты всегда возвращаются в порядке номеров реплик, поэтому итог
    не зависит от числа воркеров.
    """

    def __init__(self, threads: int | None = None, batch_size: int = 64):
        self.threads = max(1, threads if threads is not None else config.WORKER_THREADS)
        self.batch_size = max(1, batch_size)
        self._executor: ProcessPoolExecutor | None = None

    def __enter__(self) -> 'ReplicatePool':
        if self.threads > 1:
            self._executor = ProcessPoolExecutor(max_workers=self.threads)
            logger.debug(f"Запущен пул из {self.threads} процессов")
        return self

    def __exit__(self, *exc_info) -> None:
        self.shutdown()

    def shutdown(self) -> None:
        if self._executor is not None:
            self._executor.shutdown()
            self._executor = None

    def map_replicates(self, fn: ReplicateFn, replicates: int, streams: RandomStreams, start: int = 0) -> list:
        """
        Выполнить fn для реплик start..start+replicates-1.

        Args:
            fn: Функция реплики (должна сериализоваться через pickle)
            replicates: Число реплик
            streams: Семейство потоков, из которого берётся генератор реплики
            start: Номер первой реплики (для дозапуска)

        Returns:
            list: Результаты в порядке номеров реплик
        """
        batches = [
            range(first, min(first + self.batch_size, start + replicates))
            for first in range(start, start + replicates, self.batch_size)
        ]
        job = partial(_run_batch, fn, streams)
        if self._executor is None or len(batches) < 2:
            chunks = map(job, batches)
        else:
            chunks = self._executor.map(job, batches)

        results: list = []
        for chunk in chunks:
            results.extend(chunk)
        return results


# Пул по умолчанию: последовательный, пока CLI не настроит другой
_default_pool = ReplicatePool(threads=1)


def get_pool() -> ReplicatePool:
    """Текущий пул воркеров."""
    return _default_pool


def setup_pool(threads: int) -> ReplicatePool:
    """
    Настроить пул воркеров для всех оценщиков.

    Args:
        threads: Число процессов

    Returns:
        ReplicatePool: Настроенный пул (нужно закрыть через shutdown)
    """
    global _default_pool
    _default_pool.shutdown()
    _default_pool = ReplicatePool(threads=threads).__enter__()
    logger.info(f"Пул воркеров настроен: {_default_pool.threads} процесс(ов)")
    return _default_pool
