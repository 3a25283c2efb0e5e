"""Перевод исключений подкоманд в коды возврата."""
import logging
from typing import Callable

from cli.utils.validators import ConfigError

logger = logging.getLogger(__name__)

EXIT_CONFIG_ERROR = 2
EXIT_NUMERICAL_ERROR = 3


def guarded(command: str, call: Callable[[], int]) -> int:
    """
    Выполнить подкоманду с глобальной обработкой ошибок.

    Returns:
        int: Код возврата подкоманды, 2 при ошибке конфигурации, 3 при численной ошибке

    Raises:
        Exception: Любая другая ошибка после записи в лог
    """
    try:
        return call()
    except ConfigError as e:
        for message in e.errors:
            logger.error(f"Ошибка конфигурации: {message}")
        return EXIT_CONFIG_ERROR
    except ArithmeticError as e:
        logger.error(f"Численная ошибка: {e}", exc_info=True)
        return EXIT_NUMERICAL_ERROR
    except Exception as e:
        logger.error(f"Ошибка при выполнении {command}: {e}", exc_info=True)
        raise
