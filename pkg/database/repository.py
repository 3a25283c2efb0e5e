"""Репозитории для работы с базой данных."""
from typing import Iterable, List, Optional

from sqlalchemy import select, update
from sqlalchemy.orm import Session

from database.models import ExperimentRun, MetricEvaluation, utc_now


class BaseRepository:
    """Базовый репозиторий с общими методами."""

    def __init__(self, session: Session):
        self.session = session


class RunRepository(BaseRepository):
    """Репозиторий журнала запусков."""

    def create(self, command: str, config_hash: str, seed: int, replicates: int,
               threads: int = 1, preset: Optional[str] = None,
               output_path: Optional[str] = None) -> ExperimentRun:
        """Создать запись о запуске со статусом running."""
        run = ExperimentRun(
            command=command,
            preset=preset,
            config_hash=config_hash,
            seed=seed,
            replicates=replicates,
            threads=threads,
            output_path=output_path,
            status='running',
        )
        self.session.add(run)
        self.session.commit()
        self.session.refresh(run)
        return run

    def get_by_id(self, run_id: int) -> Optional[ExperimentRun]:
        """Получить запуск по ID."""
        return self.session.execute(
            select(ExperimentRun).where(ExperimentRun.id == run_id)
        ).scalar_one_or_none()

    def latest(self, command: Optional[str] = None) -> Optional[ExperimentRun]:
        """Последний запуск (при необходимости для заданной подкоманды)."""
        query = select(ExperimentRun).order_by(ExperimentRun.id.desc()).limit(1)
        if command is not None:
            query = query.where(ExperimentRun.command == command)
        return self.session.execute(query).scalar_one_or_none()

    def finish(self, run_id: int, output_path: Optional[str] = None) -> bool:
        """Отметить запуск как завершённый."""
        values = {'status': 'completed', 'finished_at': utc_now()}
        if output_path is not None:
            values['output_path'] = output_path
        result = self.session.execute(
            update(ExperimentRun).where(ExperimentRun.id == run_id).values(**values)
        )
        self.session.commit()
        return result.rowcount > 0

    def fail(self, run_id: int, error_message: str) -> bool:
        """Отметить запуск как упавший."""
        result = self.session.execute(
            update(ExperimentRun)
            .where(ExperimentRun.id == run_id)
            .values(status='failed', error_message=error_message, finished_at=utc_now())
        )
        self.session.commit()
        return result.rowcount > 0


class EvaluationRepository(BaseRepository):
    """Репозиторий сохранённых оценок метрик."""

    def get(self, config_hash: str, seed: int, replicates: int, method: str) -> List[MetricEvaluation]:
        """Все сохранённые скорости точки, по возрастанию скорости."""
        result = self.session.execute(
            select(MetricEvaluation)
            .where(
                MetricEvaluation.config_hash == config_hash,
                MetricEvaluation.seed == seed,
                MetricEvaluation.replicates == replicates,
                MetricEvaluation.method == method,
            )
            .order_by(MetricEvaluation.rate)
        )
        return list(result.scalars().all())

    def put(self, config_hash: str, seed: int, replicates: int, method: str,
            records: Iterable[dict], run_id: Optional[int] = None) -> int:
        """
        Сохранить оценки точки; уже сохранённые скорости пропускаются.

        Returns:
            int: Число добавленных записей
        """
        known = {row.rate for row in self.get(config_hash, seed, replicates, method)}
        added = 0
        for record in records:
            if record['rate'] in known:
                continue
            self.session.add(MetricEvaluation(
                run_id=run_id,
                config_hash=config_hash,
                seed=seed,
                replicates=replicates,
                method=method,
                **record,
            ))
            added += 1
        self.session.commit()
        return added
