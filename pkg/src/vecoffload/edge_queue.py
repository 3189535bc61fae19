"""Poisson-Exponential congestion model for edge-server waiting time."""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np


@dataclass(frozen=True)
class QueueModel:
    arrival_rate: float  # tasks per round
    mean_service: float  # seconds per task

    def __post_init__(self):
        if self.arrival_rate < 0:
            raise ValueError("arrival rate must be nonnegative")
        if self.mean_service <= 0:
            raise ValueError("mean service time must be positive")


def expected_wait(model: QueueModel) -> float:
    return model.arrival_rate * model.mean_service


def sample_wait(model: QueueModel, rng: np.random.Generator, size=None):
    """Backlog ``N ~ Poisson(lambda)`` followed by N exponential services of mean ``mu``.

    The sum of N exponentials is drawn directly as ``Gamma(N, mu)``; numpy returns 0 for shape 0.
    """
    return sample_waits(model.arrival_rate, model.mean_service, rng, size)


def sample_waits(arrival_rate, mean_service, rng: np.random.Generator, size=None):
    """Vectorised form of :func:`sample_wait` over broadcastable rate arrays."""
    backlog = rng.poisson(arrival_rate, size=size)
    wait = rng.gamma(backlog, mean_service)
    return float(wait) if np.ndim(wait) == 0 else wait


def wait_variance(model: QueueModel) -> float:
    # compound Poisson: lambda * E[S^2], with E[S^2] = 2 mu^2 for exponential service
    return 2.0 * model.arrival_rate * model.mean_service ** 2
