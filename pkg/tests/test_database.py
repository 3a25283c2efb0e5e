from sqlalchemy import inspect

from database.base import create_db_engine
from database.init_db import init_db, test_connection as check_connection
from database.repository import EvaluationRepository, RunRepository


def _record(rate: float, value: float = 0.5) -> dict:
    return {
        'rate': rate,
        'local_value': value,
        'local_std_error': 0.01,
        'average_rate_value': rate * 0.9,
        'average_rate_std_error': 0.001,
        'average_rate_replicates': 90,
        'served_value': value * 12.0,
        'served_std_error': 0.1,
    }


def test_run_lifecycle(session):
    runs = RunRepository(session)
    run = runs.create('tl-sweep', 'abc123', seed=5, replicates=100, threads=2, preset='small')
    assert run.status == 'running'
    assert run.started_at is not None

    assert runs.finish(run.id, 'results/tl-sweep.csv')
    stored = runs.get_by_id(run.id)
    assert stored.status == 'completed'
    assert stored.output_path == 'results/tl-sweep.csv'
    assert stored.finished_at is not None


def test_run_failure_is_recorded(session):
    runs = RunRepository(session)
    run = runs.create('validate', 'abc123', seed=0, replicates=10)
    assert runs.fail(run.id, 'QuadratureError: не сошлась')
    stored = runs.get_by_id(run.id)
    assert stored.status == 'failed'
    assert 'QuadratureError' in stored.error_message
    assert not runs.finish(run.id + 100)


def test_latest_run_by_command(session):
    runs = RunRepository(session)
    first = runs.create('lt-compare', 'h1', seed=0, replicates=10)
    runs.create('tl-sweep', 'h2', seed=0, replicates=10)
    assert runs.latest().command == 'tl-sweep'
    assert runs.latest('lt-compare').id == first.id
    assert runs.latest('validate') is None


def test_evaluations_skip_known_rates(session):
    evaluations = EvaluationRepository(session)
    assert evaluations.put('h', 1, 30, 'lt_rayleigh', [_record(0.5), _record(0.1)]) == 2
    assert evaluations.put('h', 1, 30, 'lt_rayleigh', [_record(0.1, 0.9), _record(0.2)]) == 1

    rows = evaluations.get('h', 1, 30, 'lt_rayleigh')
    assert [row.rate for row in rows] == [0.1, 0.2, 0.5]
    assert rows[0].local_value == 0.5
    assert evaluations.get('h', 2, 30, 'lt_rayleigh') == []
    assert evaluations.get('h', 1, 30, 'full_monte_carlo') == []


def test_evaluation_links_to_run(session):
    run = RunRepository(session).create('tradeoff-global', 'h', seed=1, replicates=30)
    EvaluationRepository(session).put('p', 1, 30, 'lt_rayleigh', [_record(0.3)], run_id=run.id)
    session.refresh(run)
    assert [e.rate for e in run.evaluations] == [0.3]


def test_init_db_creates_tables(tmp_path):
    url = f"sqlite:///{tmp_path / 'fresh.db'}"
    assert check_connection(url)
    init_db(url, drop=True)
    tables = set(inspect(create_db_engine(url)).get_table_names())
    assert {'experiment_runs', 'metric_evaluations'} <= tables
