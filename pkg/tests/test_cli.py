from types import SimpleNamespace

import numpy as np
import pytest

from cli.app import HANDLERS, build_parser, run
from cli.context import apply_variant, build_context, build_network, load_tree, resolve_method
from cli.errors import EXIT_CONFIG_ERROR, EXIT_NUMERICAL_ERROR, guarded
from cli.presets import COMMANDS, PRESETS, preset_tree
from cli.session import experiment_session
from cli.utils.validators import (
    ConfigError,
    validate_choice,
    validate_grid,
    validate_positive_float,
    validate_positive_int,
    validate_power_of_two,
    validate_probability,
    validate_range,
)
from content.popularity import zipf_pmf
from database.base import create_session_maker
from geometry.point_processes import ParentKind
from interference.laplace import QuadratureError
from metrics.estimators import MetricMethod
from services.csv_report_service import read_report
from services.experiment_service import ExperimentService

FAST_SWEEP = """
[network]
n_m_max = 16

[tl-sweep]
rates = [0.001, 0.1, 1.0]
method = "full_monte_carlo"
"""


def _args(command='tl-sweep', **overrides):
    values = dict(command=command, preset=None, config=None, seed=None, replicates=None,
                  threads=None, out=None, db_url=None)
    values.update(overrides)
    return SimpleNamespace(**values)


def test_validators():
    assert validate_positive_float('2.5', 'x') == (True, 2.5, '')
    assert not validate_positive_float(0, 'x')[0]
    assert not validate_positive_float(float('nan'), 'x')[0]
    assert not validate_positive_int(2.5, 'x')[0]
    assert not validate_positive_int(True, 'x')[0]
    assert validate_power_of_two(8, 'x') == (True, 8, '')
    assert not validate_power_of_two(12, 'x')[0]
    assert not validate_probability(1.5, 'x')[0]
    assert validate_choice('a', ['a', 'b'], 'x') == (True, 'a', '')
    assert not validate_grid([], 'x')[0]
    assert validate_range([1, 2], 'x') == (True, (1.0, 2.0), '')
    assert not validate_range([2, 1], 'x')[0]


def test_config_error_keeps_all_messages():
    error = ConfigError(['a', 'b'])
    assert error.errors == ['a', 'b']
    assert str(error) == 'a; b'


def test_presets_cover_figures():
    assert {'fig4', 'fig5', 'fig6', 'fig7', 'fig8-matern-winner', 'fig9-grid-winner'} <= set(PRESETS)
    fig9 = preset_tree('fig9-grid-winner')
    assert fig9['network']['parent'] == 'translated_grid'
    assert fig9['network']['delta'] == 50.0
    assert preset_tree('fig8-matern-winner')['network']['parent'] == 'matern_ii'
    assert [v['label'] for v in preset_tree('fig5')['tradeoff']['variants']] == ['L1000', 'L500', 'L100']


@pytest.mark.parametrize('name', sorted(PRESETS))
def test_every_preset_builds(name):
    tree = preset_tree(name)
    build_network(tree)
    for variant in tree['tradeoff']['variants']:
        build_network(apply_variant(tree, variant)[1])


def test_unknown_preset():
    with pytest.raises(ConfigError):
        load_tree('fig42', None)


def test_toml_override(tmp_path):
    path = tmp_path / 'exp.toml'
    path.write_text('[network]\neps = 0.2\n[content]\nlibrary_size = 100\n', encoding='utf-8')
    tree = load_tree('fig4', str(path))
    assert tree['network']['eps'] == 0.2
    assert tree['network']['lambda_u'] == 0.007
    assert tree['content']['library_size'] == 100


def test_toml_unknown_keys(tmp_path):
    path = tmp_path / 'exp.toml'
    path.write_text('[network]\nepsilon = 0.2\n[plots]\nx = 1\n', encoding='utf-8')
    with pytest.raises(ConfigError) as info:
        load_tree(None, str(path))
    assert len(info.value.errors) == 2


def test_build_network_collects_errors():
    tree = preset_tree(None)
    tree['network']['eps'] = 2.0
    tree['content']['cache_size'] = 0
    tree['channel']['kind'] = 'free-space'
    with pytest.raises(ConfigError) as info:
        build_network(tree)
    assert len(info.value.errors) == 3


def test_build_network_cache_distribution():
    tree = preset_tree(None)
    size = tree['content']['library_size']
    default = build_network(tree).content
    assert np.array_equal(default.cache_pmf, default.request_pmf)
    tree['content']['p_a'] = 'uniform'
    assert build_network(tree).content.cache_pmf == pytest.approx(np.full(size, 1.0 / size))
    tree['content']['p_a'] = 0.3
    assert build_network(tree).content.cache_pmf == pytest.approx(zipf_pmf(0.3, size))
    for bad in ('zipf', 1.5, [0.5, 0.5]):
        tree['content']['p_a'] = bad
        with pytest.raises(ConfigError):
            build_network(tree)


def test_build_network_rejects_overlapping_clusters():
    tree = preset_tree(None)
    tree['network']['delta'] = 50.0
    with pytest.raises(ConfigError):
        build_network(tree)


def test_build_network_grid_ignores_lambda():
    tree = preset_tree('fig9-grid-winner')
    cfg = build_network(tree)
    assert cfg.parent.kind == ParentKind.TRANSLATED_GRID
    assert cfg.parent.lam is None
    assert cfg.n_m_max is None


def test_apply_variant_rejects_foreign_sections():
    with pytest.raises(ConfigError):
        apply_variant(preset_tree(None), {'label': 'x', 'tl-sweep': {}})


def test_resolve_method():
    assert resolve_method('auto', 'm') is None
    assert resolve_method('lt_rayleigh', 'm') == MetricMethod.LT_RAYLEIGH
    with pytest.raises(ConfigError):
        resolve_method('closed_form', 'm')


def test_build_context_defaults(tmp_path):
    context = build_context(_args(preset='small', seed=9, replicates=12, threads=1, out=str(tmp_path)))
    assert context.seed == 9
    assert context.replicates == 12
    assert context.tree['run'] == {'seed': 9, 'replicates': 12}
    assert context.output_file('L500') == tmp_path / 'tl-sweep-L500.csv'
    assert context.metadata()['config_hash'] == context.config_hash
    other = build_context(_args(preset='small', seed=10, replicates=12, threads=1, out=str(tmp_path)))
    assert other.config_hash != context.config_hash


def test_build_context_rejects_bad_flags():
    with pytest.raises(ConfigError) as info:
        build_context(_args(seed=-1, replicates=0, threads=0))
    assert len(info.value.errors) == 3


def test_section_for_tradeoff_commands():
    context = build_context(_args(command='tradeoff-local', threads=1))
    assert context.section is context.tree['tradeoff']


def test_parser_dispatches_every_command():
    assert set(HANDLERS) == set(COMMANDS)
    parser = build_parser()
    for name, (handler, _) in HANDLERS.items():
        assert parser.parse_args([name]).handler is handler


def test_guarded_maps_numerical_failure():
    def handler():
        raise QuadratureError('не сошлась')
    assert guarded('tl-sweep', handler) == EXIT_NUMERICAL_ERROR


def test_guarded_maps_config_error():
    def handler():
        raise ConfigError('плохо')
    assert guarded('tl-sweep', handler) == EXIT_CONFIG_ERROR


def test_guarded_reraises_other_errors():
    def handler():
        raise RuntimeError('сбой')
    with pytest.raises(RuntimeError):
        guarded('tl-sweep', handler)


def test_session_marks_failed_run(tmp_path):
    url = f"sqlite:///{tmp_path / 'runs.db'}"
    with pytest.raises(RuntimeError):
        with experiment_session(_args(threads=1, out=str(tmp_path), db_url=url)):
            raise RuntimeError('сбой')
    with create_session_maker(url)() as session:
        assert ExperimentService(session).latest_run('tl-sweep').status == 'failed'


def test_parser_flags():
    args = build_parser().parse_args(['validate', '--preset', 'small', '--seed', '3', '--db-url', 'sqlite://'])
    assert (args.command, args.preset, args.seed, args.db_url) == ('validate', 'small', 3, 'sqlite://')


def test_run_unknown_command_exits_with_config_error():
    assert run(['plot']) == EXIT_CONFIG_ERROR


def test_run_malformed_config(tmp_path):
    path = tmp_path / 'bad.toml'
    path.write_text('[network]\ncluster_radius = -5\n', encoding='utf-8')
    status = run(['tl-sweep', '--config', str(path), '--db-url', f"sqlite:///{tmp_path / 'runs.db'}"])
    assert status == EXIT_CONFIG_ERROR


def _sweep(tmp_path, name: str, threads: int = 1) -> int:
    config = tmp_path / 'sweep.toml'
    config.write_text(FAST_SWEEP, encoding='utf-8')
    return run([
        'tl-sweep', '--preset', 'small', '--config', str(config), '--seed', '5', '--replicates', '40',
        '--threads', str(threads), '--out', str(tmp_path / name), '--db-url', f"sqlite:///{tmp_path / name}.db",
    ])


def test_tl_sweep_writes_report(tmp_path):
    assert _sweep(tmp_path, 'first') == 0
    metadata, header, rows = read_report(tmp_path / 'first' / 'tl-sweep.csv')
    assert metadata['seed'] == '5'
    assert metadata['replicates'] == '40'
    assert metadata['preset'] == 'small'
    assert len(metadata['config_hash']) == 16
    assert header[:3] == ['rate', 'local', 'local_std_err']
    assert [row[0] for row in rows] == ['0.001', '0.1', '1']


def test_tl_sweep_is_reproducible(tmp_path):
    assert _sweep(tmp_path, 'a') == 0
    assert _sweep(tmp_path, 'b') == 0
    first = (tmp_path / 'a' / 'tl-sweep.csv').read_bytes()
    assert first == (tmp_path / 'b' / 'tl-sweep.csv').read_bytes()


@pytest.mark.slow
def test_tl_sweep_independent_of_threads(tmp_path):
    assert _sweep(tmp_path, 'one', threads=1) == 0
    assert _sweep(tmp_path, 'two', threads=2) == 0
    assert (tmp_path / 'one' / 'tl-sweep.csv').read_bytes() == (tmp_path / 'two' / 'tl-sweep.csv').read_bytes()


def test_lt_compare_rejects_inverted_eta_range(tmp_path):
    path = tmp_path / 'lt.toml'
    path.write_text('[lt-compare]\neta_min = 1e9\neta_max = 1e5\n', encoding='utf-8')
    status = run(['lt-compare', '--config', str(path), '--db-url', f"sqlite:///{tmp_path / 'runs.db'}",
                  '--out', str(tmp_path), '--threads', '1', '--replicates', '10'])
    assert status == EXIT_CONFIG_ERROR


def test_lt_compare_reports_both_placements(tmp_path):
    path = tmp_path / 'lt.toml'
    path.write_text('[network]\nn_m_max = 16\n[lt-compare]\neta_points = 3\nradii = [0.0, 10.0]\nn1 = 2\n',
                    encoding='utf-8')
    status = run(['lt-compare', '--preset', 'small', '--config', str(path), '--replicates', '30',
                  '--threads', '1', '--out', str(tmp_path), '--db-url', f"sqlite:///{tmp_path / 'runs.db'}"])
    assert status == 0
    metadata, header, rows = read_report(tmp_path / 'lt-compare.csv')
    assert header == ['radius', 'eta', 'lt_mc', 'lt_approx', 'mc_std_err', 'lt_mc_uniform', 'uniform_std_err']
    assert len(rows) == 6
    assert metadata['n1'] == '2'


def test_density_check_command(tmp_path):
    path = tmp_path / 'density.toml'
    path.write_text('[density-check]\nlam_disc = [2.0]\nreplicates = 5\nwindow_factor = 5.0\n', encoding='utf-8')
    status = run(['density-check', '--config', str(path), '--out', str(tmp_path), '--threads', '1',
                  '--db-url', f"sqlite:///{tmp_path / 'runs.db'}"])
    assert status in (0, 1)
    _, header, rows = read_report(tmp_path / 'density-check.csv')
    assert header[0] == 'parent'
    assert [row[0] for row in rows] == ['matern_ii', 'translated_grid']


@pytest.mark.slow
def test_tradeoff_global_small(tmp_path):
    path = tmp_path / 'tradeoff.toml'
    path.write_text('[network]\nn_m_max = 16\n[tradeoff]\nmethod = "full_monte_carlo"\n', encoding='utf-8')
    status = run(['tradeoff-global', '--preset', 'small', '--config', str(path), '--replicates', '20',
                  '--threads', '1', '--out', str(tmp_path), '--db-url', f"sqlite:///{tmp_path / 'runs.db'}"])
    assert status == 0
    metadata, header, rows = read_report(tmp_path / 'tradeoff-global.csv')
    assert metadata['variant'] == 'base'
    assert len(rows) == len(preset_tree('small')['tradeoff']['rate_floors'])
    assert header[2] == 'objective'
