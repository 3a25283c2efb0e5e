"""Сервис для ведения журнала запусков."""
import logging
from typing import TYPE_CHECKING, Optional

from sqlalchemy.orm import Session

from database.models import ExperimentRun
from database.repository import EvaluationRepository, RunRepository

if TYPE_CHECKING:
    from cli.context import ExperimentContext

logger = logging.getLogger(__name__)


class ExperimentService:
    """Сервис для управления запусками экспериментов."""

    def __init__(self, session: Session):
        self.session = session
        self.run_repo = RunRepository(session)
        self.evaluation_repo = EvaluationRepository(session)
        self.current_run: Optional[ExperimentRun] = None

    def start(self, context: 'ExperimentContext') -> ExperimentRun:
        """
        Создать запись о запуске.

        Returns:
            ExperimentRun: Запись со статусом running
        """
        run = self.run_repo.create(
            command=context.command,
            preset=context.preset,
            config_hash=context.config_hash,
            seed=context.seed,
            replicates=context.replicates,
            threads=context.threads,
            output_path=str(context.output_dir),
        )
        self.current_run = run
        logger.info(f"Запуск #{run.id} ({run.command}) начат")
        return run

    def complete(self, run: ExperimentRun, context: 'ExperimentContext') -> bool:
        """Отметить запуск завершённым и сохранить список выходных файлов."""
        outputs = ', '.join(str(path) for path in context.outputs) or None
        updated = self.run_repo.finish(run.id, outputs)
        logger.info(f"Запуск #{run.id} завершён: {outputs or 'без файлов'}")
        return updated

    def fail(self, run: ExperimentRun, error: BaseException) -> bool:
        """Отметить запуск упавшим."""
        logger.warning(f"Запуск #{run.id} завершился ошибкой: {error}")
        return self.run_repo.fail(run.id, f"{type(error).__name__}: {error}")

    @property
    def run_id(self) -> Optional[int]:
        return self.current_run.id if self.current_run is not None else None

    def get_run(self, run_id: int) -> Optional[ExperimentRun]:
        """Получить запуск по ID."""
        return self.run_repo.get_by_id(run_id)

    def latest_run(self, command: Optional[str] = None) -> Optional[ExperimentRun]:
        """Последний запуск подкоманды."""
        return self.run_repo.latest(command)
