"""Сервис для записи результатов в CSV."""
import csv
import logging
from pathlib import Path
from typing import Any, Iterable, Sequence

import numpy as np

logger = logging.getLogger(__name__)


def format_value(value: Any) -> str:
    """Числа с 9 значащими цифрами, булевы как 0/1, None как пустая строка."""
    if value is None:
        return ''
    if isinstance(value, (bool, np.bool_)):
        return '1' if value else '0'
    if isinstance(value, (int, np.integer)):
        return str(int(value))
    if isinstance(value, (float, np.floating)):
        return f'{float(value):.9g}'
    return str(value)


def write_report(
    path: Path,
    columns: Sequence[str],
    rows: Iterable[Sequence[Any]],
    metadata: dict[str, Any],
) -> Path:
    """
    Записать CSV: строки метаданных с '#', заголовок, строки данных.

    Args:
        path: Путь к файлу (каталоги создаются)
        columns: Имена столбцов
        rows: Строки значений
        metadata: Хеш конфигурации, seed, число реплик и т.п.

    Returns:
        Path: Путь к записанному файлу
    """
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    count = 0
    with open(path, 'w', encoding='utf-8', newline='') as handle:
        for key, value in metadata.items():
            handle.write(f'# {key}={format_value(value)}\n')
        writer = csv.writer(handle, lineterminator='\n')
        writer.writerow(columns)
        for row in rows:
            if len(row) != len(columns):
                raise ValueError(f"Строка из {len(row)} значений для {len(columns)} столбцов")
            writer.writerow([format_value(value) for value in row])
            count += 1
    logger.info(f"Записан {path} ({count} строк)")
    return path


def read_report(path: Path) -> tuple[dict[str, str], list[str], list[list[str]]]:
    """Прочитать CSV, записанный write_report: (метаданные, заголовок, строки)."""
    metadata: dict[str, str] = {}
    with open(path, encoding='utf-8', newline='') as handle:
        lines = handle.read().splitlines()
    body = []
    for line in lines:
        if line.startswith('# '):
            key, _, value = line[2:].partition('=')
            metadata[key] = value
        else:
            body.append(line)
    table = list(csv.reader(body))
    return metadata, table[0] if table else [], table[1:]
