"""Second-stage decision: pick the BS with the longest sojourn, then classify task loss."""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Mapping, Sequence

import numpy as np

from .core import BaseStation, NetworkClass, Vehicle
from .geometry import NoCoverageError, chord_half_length, distance, sojourn_distance


class NoBaseStationError(LookupError):
    """No candidate BS is left; the task is computed locally."""


@dataclass(frozen=True)
class OffloadOutcome:
    chosen_bs: int
    sojourn_time: float
    offload_time: float
    lost: bool
    lost_with_relay: bool
    relayed: bool

    def __post_init__(self):
        if self.lost_with_relay and not self.lost:
            raise ValueError("a relay loss implies a plain loss")
        if self.relayed and self.lost_with_relay:
            raise ValueError("a relayed task is not lost")


def _occupancy(occupancy, bs: BaseStation) -> int:
    if occupancy is None:
        return 0
    if isinstance(occupancy, Mapping):
        return occupancy.get((bs.network, bs.index), 0)
    return occupancy[bs.index]


def select_bs(candidates: Sequence[BaseStation], vehicle: Vehicle, cap: int | None = None,
              occupancy=None) -> BaseStation:
    """Candidate with the largest sojourn distance; with ``cap`` set, BSs at capacity are skipped."""
    pool = [bs for bs in candidates if cap is None or _occupancy(occupancy, bs) < cap]
    if not pool:
        raise NoBaseStationError("no base station available")
    best, best_d = None, -math.inf
    for bs in pool:
        d = sojourn_distance(vehicle, bs, float(chord_half_length(bs, vehicle.y, bs.y)))
        if d > best_d:
            best, best_d = bs, d
    return best


def classify_loss(sojourn, offload):
    """Lost when the vehicle leaves coverage before the result comes back."""
    return sojourn < offload


def classify_loss_relay(sojourn, uplink_time):
    """With relaying, only an unfinished upload loses the task."""
    return sojourn < uplink_time


def _lap_distances(x0: float, direction: int, lo: float, hi: float, length: float,
                   after: float = 0.0) -> tuple[float, float]:
    """Forward travel distances to enter and leave the road segment ``[lo, hi]``.

    Road ends wrap, so the segment recurs every ``length`` metres; the first pass whose exit
    lies beyond ``after`` metres of travel is returned.
    """
    if direction < 0:
        x0, lo, hi = length - x0, length - hi, length - lo
    enter, leave = lo - x0, hi - x0
    laps = max(math.floor((max(after, 0.0) - leave) / length) + 1, 0)
    return max(enter + laps * length, 0.0), leave + laps * length


def coverage_span(vehicle: Vehicle, bs: BaseStation, length: float,
                  after: float = 0.0) -> tuple[float, float] | None:
    """Travel distances at which the vehicle enters and leaves ``bs`` coverage, or None if never.

    Only passes that end beyond ``after`` metres of travel are considered.
    """
    try:
        xp = float(chord_half_length(bs, vehicle.y, bs.y))
    except NoCoverageError:
        return None
    lo, hi = max(bs.x - xp, 0.0), min(bs.x + xp, length)
    if hi <= lo:
        return None
    return _lap_distances(vehicle.x, vehicle.direction, lo, hi, length, after)


def relay_destination(vehicle: Vehicle, network: NetworkClass, origin: BaseStation, length: float,
                      enabled: bool = True) -> BaseStation | None:
    """Next BS of the same network ahead of the vehicle that still covers it after it leaves ``origin``.

    The earliest entry wins, ties broken by the later exit. Road ends wrap around.
    """
    if not enabled:
        return None
    leave_origin = sojourn_distance(vehicle, origin, float(chord_half_length(origin, vehicle.y, origin.y)))
    best, best_key = None, None
    for bs in network.stations:
        if bs.index == origin.index:
            continue
        span = coverage_span(vehicle, bs, length, after=leave_origin)
        if span is None:
            continue
        key = (span[0], -span[1])
        if best_key is None or key < best_key:
            best, best_key = bs, key
    return best


def reception_point(vehicle: Vehicle, bs: BaseStation, elapsed: float, length: float) -> tuple[float, float]:
    """Where the vehicle picks up a result ready after ``elapsed`` seconds.

    Inside coverage at that moment it receives on the spot, otherwise on its next entry.
    """
    travelled = vehicle.velocity * elapsed
    span = coverage_span(vehicle, bs, length, after=travelled)
    if span is not None:
        travelled = max(travelled, span[0])
    return ((vehicle.x + vehicle.direction * travelled) % length, vehicle.y)


def reception_distance(vehicle: Vehicle, bs: BaseStation, elapsed: float, length: float) -> float:
    return float(distance(reception_point(vehicle, bs, elapsed, length), bs))


def occupancy_draw(rng: np.random.Generator, load: float, shape) -> np.ndarray:
    """Synthetic background EUs attached to each BS."""
    return rng.poisson(load, size=shape)
