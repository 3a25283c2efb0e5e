"""Модели базы данных."""
from datetime import datetime
from typing import Optional

import pytz
from sqlalchemy import TIMESTAMP, BigInteger, Float, ForeignKey, Integer, String, Text, UniqueConstraint
from sqlalchemy.orm import Mapped, mapped_column, relationship

from database.base import Base


def utc_now() -> datetime:
    return datetime.now(pytz.UTC)


class ExperimentRun(Base):
    """Запуск подкоманды: параметры воспроизведения и статус."""
    __tablename__ = 'experiment_runs'

    id: Mapped[int] = mapped_column(Integer, primary_key=True, autoincrement=True)
    command: Mapped[str] = mapped_column(String(50), nullable=False)
    preset: Mapped[str | None] = mapped_column(String(50), nullable=True)
    config_hash: Mapped[str] = mapped_column(String(16), nullable=False)
    seed: Mapped[int] = mapped_column(BigInteger, nullable=False)
    replicates: Mapped[int] = mapped_column(Integer, nullable=False)
    threads: Mapped[int] = mapped_column(Integer, nullable=False, default=1)
    output_path: Mapped[str | None] = mapped_column(Text, nullable=True)
    status: Mapped[str] = mapped_column(String(20), nullable=False, default='running')  # 'running', 'completed', 'failed'
    error_message: Mapped[str | None] = mapped_column(Text, nullable=True)
    started_at: Mapped[datetime] = mapped_column(TIMESTAMP(timezone=True), default=utc_now)
    finished_at: Mapped[datetime | None] = mapped_column(TIMESTAMP(timezone=True), nullable=True)

    # Relationships
    evaluations: Mapped[list['MetricEvaluation']] = relationship(back_populates='run')


class MetricEvaluation(Base):
    """Сохранённые T_L, T_G и R̄ одной точки сетки при одной скорости."""
    __tablename__ = 'metric_evaluations'
    __table_args__ = (
        UniqueConstraint('config_hash', 'seed', 'replicates', 'method', 'rate', name='uq_metric_evaluation'),
    )

    id: Mapped[int] = mapped_column(Integer, primary_key=True, autoincrement=True)
    run_id: Mapped[int | None] = mapped_column(Integer, ForeignKey('experiment_runs.id', ondelete='SET NULL'), nullable=True)
    config_hash: Mapped[str] = mapped_column(String(16), nullable=False, index=True)
    seed: Mapped[int] = mapped_column(BigInteger, nullable=False)
    replicates: Mapped[int] = mapped_column(Integer, nullable=False)
    method: Mapped[str] = mapped_column(String(20), nullable=False)
    rate: Mapped[float] = mapped_column(Float, nullable=False)
    local_value: Mapped[float] = mapped_column(Float, nullable=False)
    local_std_error: Mapped[float] = mapped_column(Float, nullable=False)
    average_rate_value: Mapped[float] = mapped_column(Float, nullable=False)
    average_rate_std_error: Mapped[float] = mapped_column(Float, nullable=False)
    average_rate_replicates: Mapped[int] = mapped_column(Integer, nullable=False)
    served_value: Mapped[float] = mapped_column(Float, nullable=False)
    served_std_error: Mapped[float] = mapped_column(Float, nullable=False)
    created_at: Mapped[datetime] = mapped_column(TIMESTAMP(timezone=True), default=utc_now)

    # Relationships
    run: Mapped[Optional['ExperimentRun']] = relationship(back_populates='evaluations')
