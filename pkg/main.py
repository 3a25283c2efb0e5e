"""Точка входа приложения."""
import logging
import sys

from cli.app import run
from config import config

# Настройка логирования
logging.basicConfig(
    level=config.LOG_LEVEL,
    format='%(asctime)s - %(name)s - %(levelname)s - %(message)s'
)

if __name__ == "__main__":
    sys.exit(run(sys.argv[1:]))
