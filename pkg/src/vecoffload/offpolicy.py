"""Off-policy network selection: IPS evaluation, per-interval target policies, and the
log-driven loop that splits the history at detected change points."""
from __future__ import annotations

import bisect
import json
from dataclasses import dataclass, field
from pathlib import Path
from typing import Iterable, Sequence

import numpy as np

from .bandits import Policy
from .changepoint import ChangePointDetector


class FullSupportError(ValueError):
    """A logged action has zero propensity, so importance weights are undefined."""


@dataclass(frozen=True)
class LogRecord:
    round: int
    context: tuple[tuple[float, float], ...]  # (lambda, mu) per network
    chosen_arm: int
    observed_cost: float
    propensity: float


@dataclass
class LogBook:
    """Column store of logged rounds."""

    rounds: np.ndarray
    context: np.ndarray  # (n, M, 2)
    arms: np.ndarray
    costs: np.ndarray
    propensities: np.ndarray

    def __post_init__(self):
        self.rounds = np.asarray(self.rounds, dtype=int)
        self.context = np.asarray(self.context, dtype=float).reshape(len(self.rounds), -1, 2)
        self.arms = np.asarray(self.arms, dtype=int)
        self.costs = np.asarray(self.costs, dtype=float)
        self.propensities = np.asarray(self.propensities, dtype=float)

    def __len__(self):
        return len(self.rounds)

    @property
    def n_arms(self) -> int:
        return self.context.shape[1]

    @property
    def expected_costs(self) -> np.ndarray:
        """``lambda * mu`` per record and network, shape ``(n, M)``."""
        return self.context[:, :, 0] * self.context[:, :, 1]

    @classmethod
    def from_records(cls, records: Sequence[LogRecord]) -> "LogBook":
        return cls(
            [r.round for r in records],
            np.array([r.context for r in records], dtype=float).reshape(len(records), -1, 2),
            [r.chosen_arm for r in records],
            [r.observed_cost for r in records],
            [r.propensity for r in records],
        )

    def records(self) -> list[LogRecord]:
        return [
            LogRecord(int(t), tuple(map(tuple, ctx.tolist())), int(a), float(c), float(p))
            for t, ctx, a, c, p in zip(self.rounds, self.context, self.arms, self.costs, self.propensities)
        ]

    def between(self, start: int, end: int) -> "LogBook":
        """Records with ``start <= round < end``."""
        m = (self.rounds >= start) & (self.rounds < end)
        return LogBook(self.rounds[m], self.context[m], self.arms[m], self.costs[m], self.propensities[m])

    def write_jsonl(self, path: str | Path) -> None:
        with open(path, "w", encoding="utf-8") as fh:
            for t, ctx, a, c, p in zip(self.rounds, self.context, self.arms, self.costs, self.propensities):
                fh.write(json.dumps({"round": int(t), "context": ctx.tolist(), "arm": int(a),
                                     "cost": float(c), "propensity": float(p)}) + "\n")

    @classmethod
    def read_jsonl(cls, path: str | Path) -> "LogBook":
        rows = [json.loads(line) for line in Path(path).read_text(encoding="utf-8").splitlines() if line.strip()]
        if not rows:
            raise ValueError(f"{path}: no log records")
        return cls([r["round"] for r in rows], [r["context"] for r in rows], [r["arm"] for r in rows],
                   [r["cost"] for r in rows], [r["propensity"] for r in rows])


@dataclass(frozen=True)
class TargetPolicy:
    probs: np.ndarray
    floor: float = 0.0

    def __post_init__(self):
        p = np.asarray(self.probs, dtype=float)
        object.__setattr__(self, "probs", p)
        if abs(p.sum() - 1.0) > 1e-9:
            raise ValueError("target probabilities must sum to one")
        if np.any(p <= 0):
            raise ValueError("target policy must give every network positive probability")


def _probs(target) -> np.ndarray:
    return target.probs if isinstance(target, TargetPolicy) else np.asarray(target, dtype=float)


def _check_support(logs: LogBook) -> None:
    if np.any(logs.propensities <= 0):
        raise FullSupportError("logging policy gave a logged action zero probability")


def ips_value(logs: LogBook, target, normalize: bool = True) -> float:
    """Importance-weighted cost ``sum_t pi_w(m_t)/pi_0(m_t) * c_t`` (divided by the record count if normalised)."""
    _check_support(logs)
    if len(logs) == 0:
        return 0.0
    total = float(np.sum(_probs(target)[logs.arms] / logs.propensities * logs.costs))
    return total / len(logs) if normalize else total


def arm_ips_costs(logs: LogBook, n_arms: int | None = None) -> tuple[np.ndarray, np.ndarray]:
    """Per-network IPS cost sums and a mask of networks that appear in the logs."""
    _check_support(logs)
    n_arms = n_arms or logs.n_arms
    s = np.bincount(logs.arms, weights=logs.costs / logs.propensities, minlength=n_arms)
    seen = np.bincount(logs.arms, minlength=n_arms) > 0
    return s, seen


def optimize_target(logs: LogBook, epsilon_floor: float = 0.01, n_arms: int | None = None) -> TargetPolicy:
    """Minimise the IPS value over the simplex with every probability at least ``epsilon_floor``.

    The objective is linear, so the optimum puts ``1 - (M-1)*floor`` on the network with the
    smallest IPS cost sum and the floor everywhere else.
    """
    n_arms = n_arms or logs.n_arms
    if epsilon_floor <= 0:
        raise ValueError("probability floor must be strictly positive")
    if n_arms * epsilon_floor > 1:
        raise ValueError("probability floor too large for the number of networks")
    s, seen = arm_ips_costs(logs, n_arms)
    if not seen.any():
        raise ValueError("no network was ever logged")
    best = int(np.argmin(np.where(seen, s, np.inf)))
    probs = np.full(n_arms, epsilon_floor)
    probs[best] = 1.0 - (n_arms - 1) * epsilon_floor
    return TargetPolicy(probs, epsilon_floor)


def true_value(logs: LogBook, target) -> float:
    """Mean over records of ``sum_m pi_w(m) * lambda_m * mu_m`` (needs the simulator's contexts)."""
    if len(logs) == 0:
        return 0.0
    return float(np.mean(logs.expected_costs @ _probs(target)))


class SmoothedLogger:
    """Wraps a deterministic policy so every network keeps positive logging probability."""

    def __init__(self, base: Policy, smoothing: float = 0.05):
        if not 0 < smoothing <= 1:
            raise ValueError("smoothing must lie in (0, 1]")
        self.base = base
        self.smoothing = smoothing

    def select(self, round: int, rng: np.random.Generator) -> tuple[int, float]:
        m = self.base.n_arms
        proposal = self.base.select(round, rng)
        arm = proposal if rng.random() >= self.smoothing else int(rng.integers(m))
        prop = self.smoothing / m + (1.0 - self.smoothing) * (arm == proposal)
        return arm, prop

    def update(self, arm: int, cost: float, round: int) -> None:
        self.base.update(arm, cost, round)


def collect_logs(logger: SmoothedLogger, waits: np.ndarray, lam: np.ndarray, mu: np.ndarray,
                 rng: np.random.Generator) -> LogBook:
    """Run the logging policy against a ``(T, M)`` table of realised waits."""
    T = len(waits)
    arms = np.empty(T, dtype=int)
    props = np.empty(T)
    costs = np.empty(T)
    for t in range(1, T + 1):
        a, p = logger.select(t, rng)
        c = float(waits[t - 1, a])
        logger.update(a, c, t)
        arms[t - 1], props[t - 1], costs[t - 1] = a, p, c
    return LogBook(np.arange(1, T + 1), np.stack([lam, mu], axis=-1), arms, costs, props)


@dataclass
class OffPolicyResult:
    boundaries: list[int]  # interval starts, first is the first logged round
    end: int  # one past the last logged round
    policies: list[TargetPolicy]
    values: list[float]  # IPS estimate per interval
    true_values: list[float]
    regret: float  # expected loss of executing the policies vs the best network, summed over rounds
    detections: list[int | None] = field(default_factory=list)

    @property
    def intervals(self) -> list[tuple[int, int]]:
        return list(zip(self.boundaries, self.boundaries[1:] + [self.end]))

    @property
    def ips_value(self) -> float:
        """Average of the per-interval IPS estimates."""
        return float(np.mean(self.values))

    @property
    def ips_gap(self) -> float:
        """Sum of per-interval (IPS estimate - true value)."""
        return float(np.sum(self.values) - np.sum(self.true_values))

    def policy_at(self, round: int) -> TargetPolicy:
        return self.policies[bisect.bisect_right(self.boundaries, round) - 1]

    def to_dict(self) -> dict:
        return {
            "intervals": [list(iv) for iv in self.intervals],
            "detections": self.detections,
            "policies": [p.probs.tolist() for p in self.policies],
            "ips_values": self.values,
            "true_values": self.true_values,
            "ips_value": self.ips_value,
            "ips_gap": self.ips_gap,
            "regret": self.regret,
        }


def _mostly_selected(arms: np.ndarray, n_arms: int) -> int:
    return int(np.argmax(np.bincount(arms, minlength=n_arms)))


def locate_changes(logs: LogBook, detector: ChangePointDetector) -> tuple[list[int], list[int | None]]:
    """Walk the prior windows in order, testing the mostly-selected network's costs in each.

    A window without a detection falls back to its upper edge.
    """
    first, last = int(logs.rounds.min()), int(logs.rounds.max())
    horizon = last
    boundaries, detections = [first], []
    for k in range(1, detector.n_windows(horizon) + 1):
        lo, hi = detector.window(k, horizon)
        lo = max(lo, boundaries[-1] + 1)
        if lo > hi:
            continue
        before = logs.between(boundaries[-1], lo)
        inside = logs.between(lo, hi + 1)
        if len(inside) == 0:
            continue
        arm = _mostly_selected(before.arms if len(before) else inside.arms, logs.n_arms)
        ref = before.costs[before.arms == arm]
        mask = inside.arms == arm
        declared = detector.detect(inside.rounds[mask], inside.costs[mask], reference=ref)
        detections.append(declared)
        boundaries.append(declared if declared is not None else hi)
    return boundaries, detections


def run_offpolicy(logs: LogBook, detector: ChangePointDetector | None = None,
                  boundaries: Iterable[int] | None = None, epsilon_floor: float = 0.01,
                  normalize: bool = True) -> OffPolicyResult:
    """Split the logs into intervals and fit one floor-constrained target policy per interval.

    Boundaries come from ``boundaries`` when given (e.g. the true change points), otherwise
    from ``detector``; with neither the whole log is one interval.
    """
    if len(logs) == 0:
        raise ValueError("empty logs")
    first, end = int(logs.rounds.min()), int(logs.rounds.max()) + 1
    detections: list[int | None] = []
    if boundaries is not None:
        starts = sorted({first, *(int(b) for b in boundaries if first < b < end)})
    elif detector is not None:
        starts, detections = locate_changes(logs, detector)
    else:
        starts = [first]
    policies, values, truths = [], [], []
    regret = 0.0
    for lo, hi in zip(starts, starts[1:] + [end]):
        chunk = logs.between(lo, hi)
        pol = optimize_target(chunk, epsilon_floor, logs.n_arms)
        policies.append(pol)
        values.append(ips_value(chunk, pol, normalize))
        truths.append(true_value(chunk, pol))
        ec = chunk.expected_costs
        regret += float(np.sum(ec @ pol.probs - ec.min(axis=1)))
    return OffPolicyResult(starts, end, policies, values, truths, regret, detections)


class OffPolicyAgent(Policy):
    """Executes the fitted per-interval target policies, sampling a network each round."""

    name = "off-policy"

    def __init__(self, result: OffPolicyResult):
        super().__init__(len(result.policies[0].probs))
        self.result = result
        self._cdfs = [np.cumsum(p.probs) for p in result.policies]

    def select(self, round, rng):
        cdf = self._cdfs[bisect.bisect_right(self.result.boundaries, round) - 1]
        return min(int(np.searchsorted(cdf, rng.random(), side="right")), self.n_arms - 1)

    def update(self, arm, cost, round):
        pass
