"""Конфигурация приложения."""
import os
from pathlib import Path
from dotenv import load_dotenv

# Загружаем переменные окружения из .env файла
env_path = Path(__file__).parent / '.env'
load_dotenv(dotenv_path=env_path)


class Config:
    """Класс конфигурации приложения."""

    # База данных для журнала запусков и кэша метрик
    DATABASE_URL: str = os.getenv('DATABASE_URL', 'sqlite:///d2dcache.db')
    DB_ECHO: bool = os.getenv('DB_ECHO', 'false').lower() in ('1', 'true', 'yes')

    # Воспроизводимость
    DEFAULT_SEED: int = int(os.getenv('DEFAULT_SEED', '0'))
    DEFAULT_REPLICATES: int = int(os.getenv('DEFAULT_REPLICATES', '2000'))

    # Пул воркеров (по умолчанию все доступные ядра)
    WORKER_THREADS: int = int(os.getenv('WORKER_THREADS', str(os.cpu_count() or 1)))

    OUTPUT_DIR: str = os.getenv('OUTPUT_DIR', 'results')
    LOG_LEVEL: str = os.getenv('LOG_LEVEL', 'INFO')

    # Оценка стандартной ошибки методом batch means
    BATCH_COUNT: int = int(os.getenv('BATCH_COUNT', '30'))

    # Квадратура преобразования Лапласа
    LT_MAX_REFINEMENTS: int = int(os.getenv('LT_MAX_REFINEMENTS', '6'))
    LT_TOLERANCE: float = float(os.getenv('LT_TOLERANCE', '1e-6'))

    @property
    def output_path(self) -> Path:
        """Каталог для CSV с результатами."""
        return Path(self.OUTPUT_DIR)


config = Config()
