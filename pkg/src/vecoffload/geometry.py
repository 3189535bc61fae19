"""Vehicle motion, EU-BS distance, coverage and sojourn geometry.

The functions accept numpy arrays wherever the formulas are elementwise, so the
simulator evaluates whole trajectories with the same code paths.
"""
from __future__ import annotations

import dataclasses
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .core import BaseStation, NetworkClass, Vehicle


class NoCoverageError(ValueError):
    """The vehicle's lane does not intersect the coverage disc."""


@dataclass(frozen=True)
class SojournGeometry:
    chord_half_length: float
    sojourn_distance: float
    sojourn_time: float


def distance(vehicle_pos, bs: BaseStation):
    x, y = vehicle_pos
    return np.sqrt(bs.height ** 2 + (bs.y - y) ** 2 + (bs.x - x) ** 2)


def _chord_sq(radius, height, dy):
    return radius ** 2 - height ** 2 - np.square(dy)


def chord_half_length(bs_class: NetworkClass | BaseStation, vehicle_y, bs_y):
    """Half length of the lane segment inside the coverage disc."""
    if isinstance(bs_class, NetworkClass):
        radius, height = bs_class.coverage_radius, bs_class.bs_height
    else:
        radius, height = bs_class.radius, bs_class.height
    sq = _chord_sq(radius, height, np.asarray(vehicle_y) - bs_y)
    if np.any(sq <= 0):
        raise NoCoverageError("lane does not cross the coverage disc")
    return np.sqrt(sq)


def sojourn_along(x, direction, bs_x, x_prime):
    """Remaining in-coverage distance along the travel direction.

    Moving toward the BS axial position the vehicle still has ``|dx| + x'`` to go,
    moving away only ``x' - |dx|``.
    """
    dx = np.asarray(bs_x) - x
    toward = np.asarray(direction) * dx > 0
    return np.where(toward, np.abs(dx) + x_prime, x_prime - np.abs(dx))


def sojourn_distance(vehicle: Vehicle, bs: BaseStation, x_prime: float) -> float:
    return float(sojourn_along(vehicle.x, vehicle.direction, bs.x, x_prime))


def sojourn_time(delta, velocity):
    if np.any(np.asarray(velocity) <= 0):
        raise ValueError("velocity must be positive")
    return delta / velocity


def sojourn(vehicle: Vehicle, bs: BaseStation) -> SojournGeometry:
    xp = float(chord_half_length(bs, vehicle.y, bs.y))
    delta = sojourn_distance(vehicle, bs, xp)
    return SojournGeometry(xp, delta, sojourn_time(delta, vehicle.velocity))


def candidate_bs_set(vehicle: Vehicle, selected_network: int,
                     networks: Sequence[NetworkClass]) -> list[BaseStation]:
    net = networks[selected_network]
    return [bs for bs in net.stations if distance(vehicle.position, bs) < net.coverage_radius]


def advance(vehicle: Vehicle, dt: float, area: tuple[float, float]) -> Vehicle:
    """Move along the road axis, wrapping around at the road ends."""
    if dt < 0:
        raise ValueError("dt must be nonnegative")
    if dt == 0:
        return vehicle
    length = area[0]
    x = (vehicle.x + vehicle.direction * vehicle.velocity * dt) % length
    return dataclasses.replace(vehicle, x=float(x))


def trajectory(vehicle: Vehicle, n_rounds: int, dt: float, length: float) -> np.ndarray:
    """x position at each of ``n_rounds`` rounds, starting at the spawn point."""
    steps = np.arange(n_rounds) * (vehicle.direction * vehicle.velocity * dt)
    return np.mod(vehicle.x + steps, length)
