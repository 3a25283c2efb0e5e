"""Сборка параметров эксперимента из пресета, TOML-файла и флагов командной строки."""
import hashlib
import json
import logging

try:
    import tomllib
except ModuleNotFoundError:  # Python < 3.11
    import tomli as tomllib
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from channel.models import ChannelKind, ChannelModel
from cli.presets import BASE, deep_merge, preset_tree
from cli.utils.validators import (
    ConfigError,
    validate_cache_distribution,
    validate_choice,
    validate_nonnegative_float,
    validate_positive_float,
    validate_positive_int,
    validate_power_of_two,
    validate_probability,
)
from cluster.network_config import NetworkConfig
from config import config
from content.popularity import ContentConfig, zipf_pmf
from geometry.point_processes import ParentKind, ParentProcess
from metrics.estimators import MetricMethod
from runner.streams import RandomStreams
from services.csv_report_service import write_report

logger = logging.getLogger(__name__)

SECTIONS = tuple(BASE)


@dataclass
class ExperimentContext:
    """Всё, что нужно обработчику подкоманды."""

    command: str
    tree: dict
    network: NetworkConfig
    seed: int
    replicates: int
    threads: int
    output_dir: Path
    preset: str | None = None
    config_path: str | None = None
    db_url: str | None = None
    outputs: list[Path] = field(default_factory=list)

    @property
    def section(self) -> dict:
        """Параметры подкоманды (для tradeoff-* общий раздел tradeoff)."""
        key = 'tradeoff' if self.command.startswith('tradeoff') else self.command
        return self.tree.get(key, {})

    @property
    def config_hash(self) -> str:
        return tree_hash(self.tree)

    @property
    def streams(self) -> RandomStreams:
        return RandomStreams(self.seed, self.command)

    def output_file(self, suffix: str | None = None) -> Path:
        name = self.command if not suffix else f"{self.command}-{suffix}"
        return self.output_dir / f"{name}.csv"

    def metadata(self, **extra) -> dict:
        """Всё, что нужно для точного повторения запуска."""
        return {
            "command": self.command,
            "preset": self.preset or "default",
            "config_hash": self.config_hash,
            "seed": self.seed,
            "replicates": self.replicates,
        } | extra

    def report(self, columns, rows, suffix: str | None = None, **extra) -> Path:
        """Записать CSV подкоманды и запомнить путь для журнала запусков."""
        path = write_report(self.output_file(suffix), columns, rows, self.metadata(**extra))
        self.outputs.append(path)
        return path


def tree_hash(tree: dict) -> str:
    """Хеш дерева параметров: одинаковый для одинаковых конфигураций."""
    payload = json.dumps(tree, sort_keys=True, default=str)
    return hashlib.sha256(payload.encode('utf-8')).hexdigest()[:16]


def load_tree(preset: str | None, path: str | None) -> dict:
    """
    Пресет, поверх которого наложен TOML-файл.

    Raises:
        ConfigError: Неизвестный пресет, ошибка чтения файла или неизвестные ключи
    """
    try:
        tree = preset_tree(preset)
    except KeyError:
        raise ConfigError(f"Неизвестный пресет: {preset}") from None
    if path is None:
        return tree

    try:
        with open(path, 'rb') as handle:
            override = tomllib.load(handle)
    except OSError as e:
        raise ConfigError(f"Не удалось прочитать {path}: {e}") from e
    except tomllib.TOMLDecodeError as e:
        raise ConfigError(f"Ошибка синтаксиса TOML в {path}: {e}") from e

    errors = []
    for section, values in override.items():
        if section not in SECTIONS:
            errors.append(f"Неизвестный раздел [{section}]")
            continue
        if not isinstance(values, dict):
            errors.append(f"[{section}] должен быть таблицей")
            continue
        unknown = sorted(set(values) - set(BASE[section]))
        if unknown:
            errors.append(f"[{section}]: неизвестные ключи {', '.join(unknown)}")
    if errors:
        raise ConfigError(errors)
    return deep_merge(tree, override)


def collect(errors: list[str], result: tuple) -> object:
    ok, value, message = result
    if not ok:
        errors.append(message)
    return value


def _cache_pmf(choice, library_size: int) -> np.ndarray | None:
    """p_A по значению content.p_a (None: как p_V)."""
    if choice == 'p_v':
        return None
    if choice == 'uniform':
        return np.full(library_size, 1.0 / library_size)
    if isinstance(choice, list):
        return np.asarray(choice, dtype=float)
    return zipf_pmf(choice, library_size)


def build_network(tree: dict) -> NetworkConfig:
    """
    NetworkConfig из разделов network, content и channel.

    Raises:
        ConfigError: Все найденные ошибки значений
    """
    net, content, channel = tree['network'], tree['content'], tree['channel']
    errors: list[str] = []
    parent_kind = collect(errors, validate_choice(net['parent'], [k.value for k in ParentKind], 'network.parent'))
    cluster_radius = collect(errors, validate_positive_float(net['cluster_radius'], 'network.cluster_radius'))
    delta = collect(errors, validate_positive_float(net['delta'], 'network.delta'))
    lam = collect(errors, validate_positive_float(net['lam'], 'network.lam'))
    lambda_u = collect(errors, validate_nonnegative_float(net['lambda_u'], 'network.lambda_u'))
    lambda_r = collect(errors, validate_nonnegative_float(net['lambda_r'], 'network.lambda_r'))
    eps = collect(errors, validate_probability(net['eps'], 'network.eps'))
    n_m_max = None
    if net.get('n_m_max'):
        n_m_max = collect(errors, validate_power_of_two(net['n_m_max'], 'network.n_m_max'))
    window_factor = collect(errors, validate_positive_float(net['window_factor'], 'network.window_factor'))

    library_size = collect(errors, validate_positive_int(content['library_size'], 'content.library_size'))
    cache_size = collect(errors, validate_positive_int(content['cache_size'], 'content.cache_size'))
    gamma = collect(errors, validate_probability(content['zipf_gamma'], 'content.zipf_gamma'))
    cache_choice = collect(errors, validate_cache_distribution(content.get('p_a', 'p_v'), 'content.p_a'))

    kind = collect(errors, validate_choice(channel['kind'], [k.value for k in ChannelKind], 'channel.kind'))
    alpha = collect(errors, validate_positive_float(channel['alpha'], 'channel.alpha'))
    c_tilde = collect(errors, validate_positive_float(channel['c_tilde'], 'channel.c_tilde'))
    power = collect(errors, validate_positive_float(channel['power'], 'channel.power'))
    noise = collect(errors, validate_nonnegative_float(channel['noise_power'], 'channel.noise_power'))
    carrier = collect(errors, validate_positive_float(channel['carrier_ghz'], 'channel.carrier_ghz'))
    if errors:
        raise ConfigError(errors)

    try:
        return NetworkConfig(
            parent=ParentProcess(ParentKind(parent_kind), delta, lam if parent_kind == ParentKind.MATERN_II else None),
            cluster_radius=cluster_radius,
            lambda_u=lambda_u,
            lambda_r=lambda_r,
            content=ContentConfig(
                library_size, cache_size, gamma, cache_pmf=_cache_pmf(cache_choice, library_size),
            ),
            channel=ChannelModel(
                kind=ChannelKind(kind), alpha=alpha, c_tilde=c_tilde, power=power,
                noise_power=noise, carrier_ghz=carrier,
            ),
            eps=eps,
            n_m_max=n_m_max,
            window_factor=window_factor,
        )
    except ValueError as e:
        raise ConfigError(str(e)) from e


def apply_variant(tree: dict, variant: dict) -> tuple[str, dict]:
    """Дерево с переопределениями варианта кривой и его метка."""
    overrides = {key: value for key, value in variant.items() if key != 'label'}
    unknown = sorted(set(overrides) - {'network', 'content', 'channel'})
    if unknown:
        raise ConfigError(f"Вариант может менять только network, content и channel: {', '.join(unknown)}")
    return str(variant.get('label', 'base')), deep_merge(tree, overrides)


def build_context(args) -> ExperimentContext:
    """
    Контекст эксперимента по разобранным аргументам командной строки.

    Raises:
        ConfigError: Некорректная конфигурация
    """
    tree = load_tree(args.preset, args.config)
    errors: list[str] = []
    seed = args.seed if args.seed is not None else config.DEFAULT_SEED
    if not 0 <= seed < 2 ** 63:
        errors.append(f"--seed: ожидалось неотрицательное целое меньше 2^63, получено {seed}")
    replicates = collect(errors, validate_positive_int(
        args.replicates if args.replicates is not None else config.DEFAULT_REPLICATES, '--replicates'))
    threads = collect(errors, validate_positive_int(
        args.threads if args.threads is not None else config.WORKER_THREADS, '--threads'))
    if errors:
        raise ConfigError(errors)

    network = build_network(tree)
    # Seed и число реплик входят в хеш, чтобы CSV описывал запуск целиком
    tree['run'] = {'seed': seed, 'replicates': replicates}
    context = ExperimentContext(
        command=args.command,
        tree=tree,
        network=network,
        seed=seed,
        replicates=replicates,
        threads=threads,
        output_dir=Path(args.out) if args.out else config.output_path,
        preset=args.preset,
        config_path=args.config,
        db_url=args.db_url,
    )
    logger.info(
        f"Эксперимент {context.command}: пресет {context.preset or 'по умолчанию'}, "
        f"seed {seed}, реплик {replicates}, хеш {context.config_hash}"
    )
    return context


def resolve_method(value, name: str) -> MetricMethod | None:
    """Метод оценки метрик из конфигурации ('auto': по типу канала)."""
    choices = ['auto', MetricMethod.LT_RAYLEIGH.value, MetricMethod.FULL_MONTE_CARLO.value]
    ok, method, message = validate_choice(value, choices, name)
    if not ok:
        raise ConfigError(message)
    return None if method == 'auto' else MetricMethod(method)
