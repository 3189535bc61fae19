"""Cost-minimising bandit policies for network selection, plus regret accounting.

All policies share a ``select(round, rng)`` / ``update(arm, cost, round)`` interface.
Indices are costs, so the arm with the *smallest* index is pulled; ties go to the
lowest arm index. Arms without data report an index of ``-inf`` and are therefore
pulled first.
"""
from __future__ import annotations

import math
from collections import deque

import numpy as np

from .core import PolicyConfig, TrafficSchedule

FORCED = -math.inf


def argmin(values) -> int:
    best, best_v = 0, values[0]
    for i in range(1, len(values)):
        if values[i] < best_v:
            best, best_v = i, values[i]
    return best


class Policy:
    name = "policy"

    def __init__(self, n_arms: int):
        if n_arms < 2:
            raise ValueError("need at least two arms")
        self.n_arms = n_arms

    def select(self, round: int, rng: np.random.Generator) -> int:
        raise NotImplementedError

    def update(self, arm: int, cost: float, round: int) -> None:
        raise NotImplementedError


class SlidingWindowUCB(Policy):
    """SW-UCB over the last ``tau`` rounds.

    ``index = window_mean - beta * sqrt(xi * log(min(C_t, tau)) / C_t^m(tau))``
    where ``C_t`` counts all pulls so far and ``C_t^m(tau)`` the arm's pulls inside the window.
    """

    name = "sw-ucb"

    def __init__(self, n_arms: int, tau: int = 100, beta: float = 0.8, xi: float = 0.2):
        super().__init__(n_arms)
        if tau < 1:
            raise ValueError("window length must be >= 1")
        self.tau, self.beta, self.xi = tau, beta, xi
        self.window = [deque() for _ in range(n_arms)]
        self._sums = [0.0] * n_arms
        self.total_pulls = 0

    def _evict(self, latest: int) -> None:
        # keep pulls from rounds latest-tau+1 .. latest
        cutoff = latest - self.tau
        for m, buf in enumerate(self.window):
            while buf and buf[0][0] <= cutoff:
                self._sums[m] -= buf.popleft()[1]
            if not buf:
                self._sums[m] = 0.0

    def count(self, arm: int) -> int:
        return len(self.window[arm])

    def mean(self, arm: int) -> float:
        return self._sums[arm] / len(self.window[arm])

    def _index(self, arm: int) -> float:
        n = len(self.window[arm])
        if n == 0:
            return FORCED
        horizon = min(self.total_pulls, self.tau)
        return self._sums[arm] / n - self.beta * math.sqrt(self.xi * math.log(horizon) / n)

    def index(self, arm: int, round: int) -> float:
        """Cost index used when deciding ``round`` (window = rounds ``round-tau .. round-1``)."""
        self._evict(round - 1)
        return self._index(arm)

    def select(self, round, rng=None):
        self._evict(round - 1)
        return argmin([self._index(m) for m in range(self.n_arms)])

    def update(self, arm, cost, round):
        self.window[arm].append((round, cost))
        self._sums[arm] += cost
        self.total_pulls += 1
        self._evict(round)


class DiscountedUCB(Policy):
    """Discounted UCB: every update first multiplies all accumulators by ``gamma``."""

    name = "d-ucb"

    def __init__(self, n_arms: int, gamma: float = 0.9, beta: float = 0.8, xi: float = 0.2):
        super().__init__(n_arms)
        if not 0 < gamma <= 1:
            raise ValueError("gamma must lie in (0, 1]")
        self.gamma, self.beta, self.xi = gamma, beta, xi
        self.sums = [0.0] * n_arms
        self.counts = [0.0] * n_arms
        self.pulled = [False] * n_arms

    def mean(self, arm: int) -> float:
        return self.sums[arm] / self.counts[arm]

    def index(self, arm: int, round: int = 0) -> float:
        if not self.pulled[arm]:
            return FORCED
        total = max(sum(self.counts), 1.0)
        n = self.counts[arm]
        return self.sums[arm] / n - self.beta * math.sqrt(self.xi * math.log(total) / n)

    def select(self, round, rng=None):
        return argmin([self.index(m) for m in range(self.n_arms)])

    def update(self, arm, cost, round=0):
        g = self.gamma
        self.sums = [s * g for s in self.sums]
        self.counts = [c * g for c in self.counts]
        self.sums[arm] += cost
        self.counts[arm] += 1.0
        self.pulled[arm] = True


class UCB(Policy):
    """Full-history UCB with the same (beta, xi) scaling as SW-UCB."""

    name = "ucb"

    def __init__(self, n_arms: int, beta: float = 0.8, xi: float = 0.2):
        super().__init__(n_arms)
        self.beta, self.xi = beta, xi
        self.sums = [0.0] * n_arms
        self.counts = [0] * n_arms
        self.total_pulls = 0

    def mean(self, arm: int) -> float:
        return self.sums[arm] / self.counts[arm]

    def index(self, arm: int, round: int = 0) -> float:
        n = self.counts[arm]
        if n == 0:
            return FORCED
        return self.sums[arm] / n - self.beta * math.sqrt(self.xi * math.log(self.total_pulls) / n)

    def select(self, round, rng=None):
        return argmin([self.index(m) for m in range(self.n_arms)])

    def update(self, arm, cost, round=0):
        self.sums[arm] += cost
        self.counts[arm] += 1
        self.total_pulls += 1


class EpsilonGreedy(Policy):
    """Explores uniformly with probability ``1/t``, otherwise exploits the lowest empirical mean."""

    name = "eps-greedy"

    def __init__(self, n_arms: int):
        super().__init__(n_arms)
        self.sums = [0.0] * n_arms
        self.counts = [0] * n_arms

    def select(self, round, rng):
        for m in range(self.n_arms):
            if self.counts[m] == 0:
                return m
        if rng.random() < 1.0 / round:
            return int(rng.integers(self.n_arms))
        return argmin([s / c for s, c in zip(self.sums, self.counts)])

    def update(self, arm, cost, round=0):
        self.sums[arm] += cost
        self.counts[arm] += 1


class RandomPolicy(Policy):
    name = "random"

    def select(self, round, rng):
        return int(rng.integers(self.n_arms))

    def update(self, arm, cost, round=0):
        pass


def make_policy(name: str, n_arms: int, cfg: PolicyConfig | None = None, **overrides) -> Policy:
    cfg = cfg or PolicyConfig()
    p = {"tau": cfg.tau, "beta": cfg.beta, "xi": cfg.xi, "gamma": cfg.gamma, **overrides}
    if name == "sw-ucb":
        return SlidingWindowUCB(n_arms, p["tau"], p["beta"], p["xi"])
    if name == "d-ucb":
        return DiscountedUCB(n_arms, p["gamma"], p["beta"], p["xi"])
    if name == "ucb":
        return UCB(n_arms, p["beta"], p["xi"])
    if name == "eps-greedy":
        return EpsilonGreedy(n_arms)
    if name == "random":
        return RandomPolicy(n_arms)
    raise ValueError(f"unknown policy {name!r}")


def regret_increment(chosen: int, schedule: TrafficSchedule, round: int) -> float:
    costs = schedule.expected_costs(round)
    return costs[chosen] - min(costs)


class RegretLedger:
    def __init__(self, n_intervals: int = 1):
        self.increments: list[float] = []
        self.interval_sums = [0.0] * n_intervals
        self.cumulative = 0.0

    def add(self, increment: float, interval: int = 0) -> float:
        if increment < 0:
            raise ValueError("regret increments are nonnegative")
        self.increments.append(increment)
        self.interval_sums[interval] += increment
        self.cumulative += increment
        return self.cumulative
