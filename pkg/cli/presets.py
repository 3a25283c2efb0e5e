"""Именованные наборы параметров для воспроизведения кривых."""
import copy

import numpy as np

COMMANDS = (
    'lt-compare',
    'tl-sweep',
    'tradeoff-global',
    'tradeoff-local',
    'tradeoff-localglobal',
    'density-check',
    'validate',
)


def _linspace(low: float, high: float, points: int) -> list[float]:
    return [round(v, 12) for v in np.linspace(low, high, points).tolist()]


BASE = {
    'network': {
        'parent': 'matern_ii',
        'cluster_radius': 50.0,
        'delta': 100.0,
        'lam': 1e-4,
        'lambda_u': 0.012,
        'lambda_r': 0.003,
        'eps': 0.05,
        # 0: n_m_max оценивается предварительным прогоном
        'n_m_max': 0,
        'window_factor': 40.0,
    },
    'content': {
        'library_size': 500,
        'cache_size': 6,
        'zipf_gamma': 0.6,
        # p_A: 'p_v', 'uniform', показатель Ципфа или список вероятностей
        'p_a': 'p_v',
    },
    'channel': {
        'kind': 'rayleigh',
        'alpha': 4.0,
        'c_tilde': 1.0,
        'power': 1.0,
        'noise_power': 0.0,
        'carrier_ghz': 2.45,
    },
    'lt-compare': {
        'eta_min': 1e5,
        'eta_max': 1e9,
        'eta_points': 10,
        'radii': [0.0, 35.0],
        'n1': 8,
        'activity': 'worst_case_b1',
    },
    'tl-sweep': {
        'rates': np.geomspace(1e-6, 1.0, 8).tolist(),
        'method': 'auto',
    },
    'tradeoff': {
        'cluster_radius': [10.0, 60.0],
        'rate': [1e-3, 1.0],
        'lam': [1e-5, 1e-3],
        'delta_ratio': [2.0, 2.0],
        'points': 12,
        'rate_floors': _linspace(0.0, 0.43, 12),
        'density_floors': [0.0],
        'local_floors': _linspace(0.0, 1.0, 12),
        'fixed_rate': 0.1,
        'method': 'auto',
        'variants': [{'label': 'base'}],
    },
    'density-check': {
        'lam_disc': [0.5, 2.0, 10.0],
        'replicates': 200,
        'window_factor': 30.0,
    },
    'validate': {
        'replicates': 200,
        'match_replicates': 100000,
        'rate_instances': 1000,
        'activity_replicates': 10000,
        'activity_etas': 10,
        'region_factor': 4.0,
        'rate': 0.01,
    },
}

PRESETS: dict[str, dict] = {
    'fig4': {
        # lambda_u = 4·lambda_r, E[N_m] около 8: наиболее вероятно W = 8 = n1
        'network': {'lambda_u': 0.007, 'lambda_r': 0.00175, 'eps': 0.5},
    },
    'fig5': {
        'tradeoff': {
            'variants': [
                {'label': 'L1000', 'content': {'library_size': 1000}},
                {'label': 'L500', 'content': {'library_size': 500}},
                {'label': 'L100', 'content': {'library_size': 100}},
            ],
        },
    },
    'fig6': {
        'tradeoff': {
            'density_floors': [3e-6, 1e-5, 3e-5, 5e-5],
        },
    },
    'fig7': {
        'tradeoff': {'fixed_rate': 0.1},
    },
    'fig8-matern-winner': {
        'network': {
            'parent': 'matern_ii', 'cluster_radius': 20.0, 'delta': 40.0, 'lam': 2e-4,
            'lambda_u': 0.0278, 'lambda_r': 0.0278,
        },
        'content': {'library_size': 300, 'zipf_gamma': 0.4},
        'tradeoff': {
            'cluster_radius': [20.0, 20.0],
            'lam': [2e-4, 2e-4],
            'delta_ratio': [2.0, 2.0],
            'rate_floors': _linspace(0.0, 0.25, 12),
            'variants': [
                {'label': 'M5-rayleigh', 'content': {'cache_size': 5}, 'network': {'eps': 0.1}, 'channel': {'kind': 'rayleigh'}},
                {'label': 'M10-rayleigh', 'content': {'cache_size': 10}, 'network': {'eps': 0.1}, 'channel': {'kind': 'rayleigh'}},
                {'label': 'M20-rayleigh', 'content': {'cache_size': 20}, 'network': {'eps': 0.2}, 'channel': {'kind': 'rayleigh'}},
                {'label': 'M5-winner', 'content': {'cache_size': 5}, 'network': {'eps': 0.0}, 'channel': {'kind': 'winner'}},
                {'label': 'M10-winner', 'content': {'cache_size': 10}, 'network': {'eps': 0.0}, 'channel': {'kind': 'winner'}},
                {'label': 'M20-winner', 'content': {'cache_size': 20}, 'network': {'eps': 0.1}, 'channel': {'kind': 'winner'}},
            ],
        },
    },
    'small': {
        'network': {
            'cluster_radius': 20.0, 'delta': 40.0, 'lam': 2e-4,
            'lambda_u': 0.01, 'lambda_r': 0.01, 'window_factor': 10.0,
        },
        'content': {'library_size': 10, 'cache_size': 2},
        'tradeoff': {'points': 3, 'cluster_radius': [10.0, 20.0], 'lam': [1e-4, 1e-3]},
    },
}

# Решётка: тот же набор кривых, delta = 50
PRESETS['fig9-grid-winner'] = copy.deepcopy(PRESETS['fig8-matern-winner'])
PRESETS['fig9-grid-winner']['network'].update({'parent': 'translated_grid', 'delta': 50.0})
PRESETS['fig9-grid-winner']['tradeoff']['delta_ratio'] = [2.5, 2.5]


def deep_merge(base: dict, override: dict) -> dict:
    """Рекурсивное слияние деревьев параметров (override побеждает)."""
    merged = copy.deepcopy(base)
    for key, value in override.items():
        if isinstance(value, dict) and isinstance(merged.get(key), dict):
            merged[key] = deep_merge(merged[key], value)
        else:
            merged[key] = copy.deepcopy(value)
    return merged


def preset_tree(name: str | None) -> dict:
    """Полное дерево параметров пресета (None: значения по умолчанию)."""
    if name is None:
        return copy.deepcopy(BASE)
    if name not in PRESETS:
        raise KeyError(name)
    return deep_merge(BASE, PRESETS[name])
