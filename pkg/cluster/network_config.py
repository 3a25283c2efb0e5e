"""Параметры сети для одной точки эксперимента."""
import hashlib
import json
import math
from dataclasses import dataclass, field, replace

from channel.models import ChannelModel
from content.popularity import ContentConfig
from geometry.point_processes import ParentKind, ParentProcess, Window

DEFAULT_WINDOW_FACTOR = 40.0


@dataclass(frozen=True)
class NetworkConfig:
    """Все параметры модели: плотности, радиусы, контент, канал и стратегия."""

    parent: ParentProcess
    cluster_radius: float
    lambda_u: float
    lambda_r: float
    content: ContentConfig
    channel: ChannelModel = field(default_factory=ChannelModel)
    eps: float = 0.05
    n_m_max: int | None = None
    window_factor: float = DEFAULT_WINDOW_FACTOR

    def __post_init__(self):
        if not self.cluster_radius > 0:
            raise ValueError(f"Радиус кластера должен быть положительным: {self.cluster_radius}")
        if self.lambda_u < 0 or self.lambda_r < 0:
            raise ValueError("Интенсивности пользователей не могут быть отрицательными")
        if not 0 <= self.eps <= 1:
            raise ValueError(f"eps должен лежать в [0, 1]: {self.eps}")
        if self.parent.delta < 2 * self.cluster_radius:
            raise ValueError(
                f"Нужен зазор delta >= 2·R_c: delta={self.parent.delta}, R_c={self.cluster_radius}"
            )
        if self.n_m_max is not None and (self.n_m_max < 1 or self.n_m_max & (self.n_m_max - 1)):
            raise ValueError(f"n_m_max должен быть степенью двойки: {self.n_m_max}")
        if not self.window_factor > 1:
            raise ValueError(f"Множитель окна должен быть больше 1: {self.window_factor}")

    @property
    def parent_density(self) -> float:
        """lambda_p: плотность центров кластеров."""
        return self.parent.density

    @property
    def cluster_area(self) -> float:
        return math.pi * self.cluster_radius ** 2

    @property
    def mean_requests(self) -> float:
        """E[N_r] = lambda_r·π·R_c²."""
        return self.lambda_r * self.cluster_area

    @property
    def simulation_window(self) -> Window:
        """Окно радиуса rho_sim = window_factor·delta вокруг начала координат."""
        return Window(self.window_factor * self.parent.delta)

    @property
    def max_slots(self) -> int:
        """Delta = W_H(n_m_max)."""
        if self.n_m_max is None:
            raise ValueError("n_m_max ещё не определён (см. cluster.marks.resolve_max_matches)")
        return self.n_m_max

    def with_geometry(self, cluster_radius: float, delta: float, lam: float | None) -> 'NetworkConfig':
        """Копия с другими R_c, delta и интенсивностью предложений."""
        parent = ParentProcess(self.parent.kind, delta, lam if self.parent.kind == ParentKind.MATERN_II else None)
        return replace(self, parent=parent, cluster_radius=cluster_radius)

    def fingerprint(self) -> dict:
        """Описание конфигурации для хеша и журнала запусков."""
        return {
            'parent': {'kind': self.parent.kind.value, 'delta': self.parent.delta, 'lam': self.parent.lam},
            'cluster_radius': self.cluster_radius,
            'lambda_u': self.lambda_u,
            'lambda_r': self.lambda_r,
            'content': self.content.fingerprint(),
            'channel': {
                key: (value.value if hasattr(value, 'value') else value)
                for key, value in vars(self.channel).items()
                if key not in ('los', 'nlos', 'inter')
            } | {
                'los': vars(self.channel.los),
                'nlos': vars(self.channel.nlos),
                'inter': vars(self.channel.inter),
            },
            'eps': self.eps,
            'n_m_max': self.n_m_max,
            'window_factor': self.window_factor,
        }

    def config_hash(self) -> str:
        payload = json.dumps(self.fingerprint(), sort_keys=True, default=str)
        return hashlib.sha256(payload.encode('utf-8')).hexdigest()[:16]
