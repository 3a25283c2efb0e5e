"""Контекст эксперимента, пул воркеров и запись запуска в журнал."""
from contextlib import contextmanager
from typing import Iterator

from cli.context import ExperimentContext, build_context
from database.base import create_session_maker
from runner.pool import setup_pool
from services.experiment_service import ExperimentService


@contextmanager
def experiment_session(args) -> Iterator[tuple[ExperimentContext, ExperimentService]]:
    """
    Собрать контекст, настроить пул и вести запись ExperimentRun.

    Запуск отмечается завершённым при нормальном выходе из блока и упавшим
    при исключении; исключение пробрасывается дальше.
    """
    context = build_context(args)
    session_maker = create_session_maker(context.db_url)
    pool = setup_pool(context.threads)
    try:
        with session_maker() as session:
            experiment = ExperimentService(session)
            run = experiment.start(context)
            try:
                yield context, experiment
            except Exception as e:
                experiment.fail(run, e)
                raise
            experiment.complete(run, context)
    finally:
        pool.shutdown()
