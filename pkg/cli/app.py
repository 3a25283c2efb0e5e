"""Разбор командной строки и запуск подкоманд."""
import argparse
import logging
from typing import Sequence

from cli.errors import EXIT_CONFIG_ERROR, guarded
from cli.handlers.checks import density_command, validate_command
from cli.handlers.laplace import lt_compare
from cli.handlers.sweeps import tl_sweep
from cli.handlers.tradeoff import tradeoff_global, tradeoff_local, tradeoff_local_global
from cli.presets import PRESETS
from cli.session import experiment_session

logger = logging.getLogger(__name__)

# Подкоманда -> (обработчик, краткое описание)
HANDLERS = {
    'lt-compare': (lt_compare, 'Преобразование Лапласа помехи: Монте-Карло против приближения'),
    'tl-sweep': (tl_sweep, 'T_L, T_G и средняя скорость на сетке скоростей'),
    'tradeoff-global': (tradeoff_global, 'Фронт (r, max T_G) при средней скорости >= r'),
    'tradeoff-local': (tradeoff_local, 'Фронт (r, max T_L) при ограничении на плотность кластеров'),
    'tradeoff-localglobal': (tradeoff_local_global, 'Фронт (t_c, max T_G) при T_L >= t_c'),
    'density-check': (density_command, 'Эмпирическая плотность родительских процессов'),
    'validate': (validate_command, 'Проверки свойств модели'),
}


def _common_options() -> argparse.ArgumentParser:
    options = argparse.ArgumentParser(add_help=False)
    options.add_argument('--config', help='TOML-файл поверх пресета')
    options.add_argument('--preset', choices=sorted(PRESETS), help='Именованный набор параметров')
    options.add_argument('--seed', type=int, help='64-битный seed (по умолчанию DEFAULT_SEED)')
    options.add_argument('--replicates', type=int, help='Число реплик Монте-Карло')
    options.add_argument('--out', help='Каталог для CSV (по умолчанию OUTPUT_DIR)')
    options.add_argument('--threads', type=int, help='Число процессов-воркеров')
    options.add_argument('--db-url', dest='db_url', help='URL базы журнала запусков')
    return options


def build_parser() -> argparse.ArgumentParser:
    """Парсер с подкомандой на каждый обработчик."""
    parser = argparse.ArgumentParser(
        prog='d2dcache',
        description='Моделирование кэширования видео в D2D-кластерах',
    )
    subparsers = parser.add_subparsers(dest='command', required=True, metavar='command')
    options = _common_options()
    for name, (handler, summary) in HANDLERS.items():
        command = subparsers.add_parser(name, parents=[options], help=summary, description=summary)
        command.set_defaults(handler=handler)
    return parser


def execute(args: argparse.Namespace) -> int:
    """Выполнить разобранную подкоманду внутри записи журнала запусков."""
    with experiment_session(args) as (context, experiment):
        return args.handler(context, experiment)


def run(argv: Sequence[str]) -> int:
    """
    Выполнить подкоманду.

    Returns:
        int: 0 при успехе, 1 при непройденной проверке, 2 при ошибке
        конфигурации, 3 при численной ошибке
    """
    try:
        args = build_parser().parse_args(list(argv))
    except SystemExit as e:
        # argparse уже напечатал диагностику
        return EXIT_CONFIG_ERROR if e.code else 0
    return guarded(args.command, lambda: execute(args))
