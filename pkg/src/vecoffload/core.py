"""Static scenario types: networks, vehicles, tasks and the traffic schedule."""
from __future__ import annotations

import enum
from dataclasses import dataclass, field
from typing import NamedTuple, Sequence

import numpy as np

MB = 1_000_000
GIGA = 1e9


class AppKind(str, enum.Enum):
    PROCESSING = "processing"
    COLLECTING = "collecting"


@dataclass(frozen=True)
class BaseStation:
    network: int
    index: int
    x: float
    y: float
    height: float
    radius: float


@dataclass(frozen=True)
class NetworkClass:
    """One homogeneous tier of base stations; a bandit arm."""

    id: int
    name: str
    coverage_radius: float
    bs_height: float
    bandwidth: float
    compute_rate: float
    bs_positions: tuple[tuple[float, float], ...]

    def __post_init__(self):
        if self.coverage_radius <= self.bs_height:
            raise ValueError(f"{self.name}: coverage radius must exceed BS height")
        if self.bandwidth <= 0 or self.compute_rate <= 0:
            raise ValueError(f"{self.name}: bandwidth and compute rate must be positive")
        object.__setattr__(self, "bs_positions", tuple((float(x), float(y)) for x, y in self.bs_positions))

    @property
    def stations(self) -> tuple[BaseStation, ...]:
        return tuple(
            BaseStation(self.id, j, x, y, self.bs_height, self.coverage_radius)
            for j, (x, y) in enumerate(self.bs_positions)
        )


@dataclass(frozen=True)
class Vehicle:
    x: float
    y: float
    velocity: float
    direction: int
    transmit_power: float
    local_compute_rate: float

    def __post_init__(self):
        if self.direction not in (1, -1):
            raise ValueError("direction must be +1 or -1")

    @property
    def position(self) -> tuple[float, float]:
        return (self.x, self.y)


@dataclass(frozen=True)
class Task:
    upload_size: float
    download_size: float
    ops_per_byte: float
    app_kind: AppKind


class TaskBatch(NamedTuple):
    """Column form of many tasks; duck-types with :class:`Task` in the timing helpers."""

    upload_size: np.ndarray
    download_size: np.ndarray
    ops_per_byte: np.ndarray
    is_processing: np.ndarray


@dataclass(frozen=True)
class Interval:
    start: int  # inclusive
    end: int  # exclusive
    params: tuple[tuple[float, float], ...]  # (lambda, mu) per network

    @property
    def expected_costs(self) -> tuple[float, ...]:
        return tuple(lam * mu for lam, mu in self.params)


@dataclass(frozen=True)
class TrafficSchedule:
    """Piece-wise stationary (lambda, mu) per network.

    Intervals are half-open ``[start, end)`` and must tile ``[1, horizon]``.
    """

    intervals: tuple[Interval, ...]
    mean_interarrival: float
    error_range: float

    def __post_init__(self):
        if not self.intervals:
            raise ValueError("schedule needs at least one interval")
        if self.intervals[0].start != 1:
            raise ValueError("first interval must start at round 1")
        n_arms = len(self.intervals[0].params)
        for prev, nxt in zip(self.intervals, self.intervals[1:]):
            if prev.end != nxt.start:
                raise ValueError("intervals must be contiguous")
        for iv in self.intervals:
            if iv.end <= iv.start:
                raise ValueError("empty interval")
            if len(iv.params) != n_arms:
                raise ValueError("every interval needs one (lambda, mu) per network")
            for lam, mu in iv.params:
                if lam < 0 or mu <= 0:
                    raise ValueError("need lambda >= 0 and mu > 0")

    @classmethod
    def from_boundaries(cls, change_points: Sequence[int], horizon: int, params, mean_interarrival=None,
                        error_range=0.0) -> "TrafficSchedule":
        bounds = [1, *change_points, horizon + 1]
        if len(params) != len(bounds) - 1:
            raise ValueError("need one parameter set per interval")
        intervals = tuple(
            Interval(int(a), int(b), tuple((float(l), float(m)) for l, m in p))
            for a, b, p in zip(bounds, bounds[1:], params)
        )
        if mean_interarrival is None:
            mean_interarrival = float(horizon)
        return cls(intervals, float(mean_interarrival), float(error_range))

    @property
    def horizon(self) -> int:
        return self.intervals[-1].end - 1

    @property
    def n_networks(self) -> int:
        return len(self.intervals[0].params)

    @property
    def change_points(self) -> tuple[int, ...]:
        return tuple(iv.start for iv in self.intervals[1:])

    def interval_index(self, round: int) -> int:
        if not 1 <= round <= self.horizon:
            raise IndexError(f"round {round} outside horizon [1, {self.horizon}]")
        starts = [iv.start for iv in self.intervals]
        return int(np.searchsorted(starts, round, side="right")) - 1

    def params(self, round: int, network: int) -> tuple[float, float]:
        return self.intervals[self.interval_index(round)].params[network]

    def expected_costs(self, round: int) -> tuple[float, ...]:
        return self.intervals[self.interval_index(round)].expected_costs

    def as_arrays(self) -> tuple[np.ndarray, np.ndarray]:
        """Per-round ``(lambda, mu)`` arrays of shape ``(horizon, n_networks)``; row 0 is round 1."""
        lam = np.empty((self.horizon, self.n_networks))
        mu = np.empty_like(lam)
        for iv in self.intervals:
            sl = slice(iv.start - 1, iv.end - 1)
            lam[sl] = [p[0] for p in iv.params]
            mu[sl] = [p[1] for p in iv.params]
        return lam, mu

    def interval_ids(self) -> np.ndarray:
        ids = np.empty(self.horizon, dtype=int)
        for k, iv in enumerate(self.intervals):
            ids[iv.start - 1:iv.end - 1] = k
        return ids


def schedule_params(schedule: TrafficSchedule, round: int, network: int) -> tuple[float, float]:
    return schedule.params(round, network)


@dataclass(frozen=True)
class VehicleConfig:
    v_min: float = 10.0
    v_max: float = 20.0
    transmit_power: float = 0.2
    local_compute_rate: float = 15 * GIGA

    def __post_init__(self):
        if not 0 < self.v_min <= self.v_max:
            raise ValueError("need 0 < v_min <= v_max")


@dataclass(frozen=True)
class TaskConfig:
    size_min: float = 1 * MB
    size_max: float = 5 * MB
    download_ratio: float = 5.0
    processing_ops_per_byte: float = 10 * GIGA / MB
    collecting_ops_per_byte: float = 1 * GIGA / MB
    processing_share: float = 0.5

    def __post_init__(self):
        if not 0 <= self.size_min <= self.size_max:
            raise ValueError("invalid task size range")
        if self.download_ratio <= 0:
            raise ValueError("download ratio must be positive")
        if not 0 <= self.processing_share <= 1:
            raise ValueError("processing share must lie in [0, 1]")


@dataclass(frozen=True)
class PolicyConfig:
    tau: int = 100
    beta: float = 0.8
    xi: float = 0.2
    gamma: float = 0.9
    alpha: float = 0.05
    epsilon_floor: float = 0.01
    logging_smoothing: float = 0.05
    calibration_trials: int = 500


@dataclass(frozen=True)
class ScenarioConfig:
    networks: tuple[NetworkClass, ...]
    schedule: TrafficSchedule
    area_length: float = 1000.0
    area_width: float = 50.0
    vehicle: VehicleConfig = field(default_factory=VehicleConfig)
    task: TaskConfig = field(default_factory=TaskConfig)
    policy: PolicyConfig = field(default_factory=PolicyConfig)
    noise_density: float = 1e-20
    bs_transmit_power: float = 1.0
    relay_backhaul_time: float = 0.05
    relay_enabled: bool = True
    interferers: int = 0
    bs_cap: int | None = None
    background_load: float = 0.0
    round_duration: float = 1.0
    seed: int = 0

    def __post_init__(self):
        if len(self.networks) < 2:
            raise ValueError("need at least two networks")
        if len(self.networks) != self.schedule.n_networks:
            raise ValueError("schedule and network list disagree on the number of networks")
        if self.area_length <= 0 or self.area_width < 0:
            raise ValueError("invalid area")
        if self.noise_density <= 0 or self.bs_transmit_power <= 0:
            raise ValueError("noise density and BS power must be positive")
        if self.round_duration <= 0 or self.relay_backhaul_time < 0:
            raise ValueError("invalid timing parameters")
        if self.interferers < 0 or self.background_load < 0:
            raise ValueError("interferer count and background load must be nonnegative")

    @property
    def horizon(self) -> int:
        return self.schedule.horizon

    @property
    def n_networks(self) -> int:
        return len(self.networks)

    def noise_power(self, network: int) -> float:
        return self.noise_density * self.networks[network].bandwidth


def draw_tasks(rng: np.random.Generator, config: ScenarioConfig | TaskConfig, n: int) -> TaskBatch:
    tc = config.task if isinstance(config, ScenarioConfig) else config
    up = rng.uniform(tc.size_min, tc.size_max, size=n)
    proc = rng.random(n) < tc.processing_share
    ops = np.where(proc, tc.processing_ops_per_byte, tc.collecting_ops_per_byte)
    return TaskBatch(up, up / tc.download_ratio, ops, proc)


def generate_task(rng: np.random.Generator, config: ScenarioConfig | TaskConfig) -> Task:
    b = draw_tasks(rng, config, 1)
    kind = AppKind.PROCESSING if b.is_processing[0] else AppKind.COLLECTING
    return Task(float(b.upload_size[0]), float(b.download_size[0]), float(b.ops_per_byte[0]), kind)


def place_stations(count: int, length: float, width: float, sides: Sequence[str]) -> tuple[tuple[float, float], ...]:
    """Evenly spaced BSs along the road, cycling through the given sides (upper/lower/middle)."""
    y_of = {"upper": width, "lower": 0.0, "middle": width / 2}
    spacing = length / count
    return tuple(((j + 0.5) * spacing, y_of[sides[j % len(sides)]]) for j in range(count))
