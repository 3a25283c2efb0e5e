"""Скрипт инициализации базы данных."""
import logging

from sqlalchemy import text

from database.base import Base, create_db_engine
from database.models import ExperimentRun, MetricEvaluation  # noqa: F401  регистрация таблиц

logger = logging.getLogger(__name__)


def init_db(url: str | None = None, drop: bool = False) -> None:
    """Создать все таблицы (drop=True сначала удаляет существующие)."""
    engine = create_db_engine(url)
    with engine.begin() as conn:
        if drop:
            Base.metadata.drop_all(conn)
        Base.metadata.create_all(conn)
    logger.info(f"База данных инициализирована: {', '.join(sorted(Base.metadata.tables))}")


def test_connection(url: str | None = None) -> bool:
    """Протестировать подключение к базе данных."""
    try:
        with create_db_engine(url).connect() as conn:
            conn.execute(text("SELECT 1")).scalar()
        logger.info("Подключение к базе данных успешно")
        return True
    except Exception as e:
        logger.error(f"Ошибка подключения к базе данных: {e}")
        return False


if __name__ == "__main__":
    logging.basicConfig(level=logging.INFO)
    if test_connection():
        init_db()
