"""Базовые классы для работы с базой данных."""
from sqlalchemy import Engine, create_engine
from sqlalchemy.orm import DeclarativeBase, Session, sessionmaker

from config import config


class Base(DeclarativeBase):
    """Базовый класс для всех моделей."""
    pass


def create_db_engine(url: str | None = None) -> Engine:
    """Создать engine (по умолчанию из DATABASE_URL)."""
    return create_engine(url or config.DATABASE_URL, echo=config.DB_ECHO, future=True)


def create_session_maker(url: str | None = None) -> sessionmaker[Session]:
    """
    Фабрика сессий для журнала запусков.

    Таблицы создаются при первом подключении, поэтому новый файл SQLite
    сразу готов к работе.
    """
    engine = create_db_engine(url)
    Base.metadata.create_all(engine)
    return sessionmaker(engine, class_=Session, expire_on_commit=False)
