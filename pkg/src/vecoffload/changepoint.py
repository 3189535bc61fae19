"""Single mean-shift likelihood ratio test, restricted to a prior search window.

The sample statistic is the ratio of the two-segment residual sum of squares to the
pooled one, raised to ``n/2``. Splits keep at least ``MIN_SEGMENT`` samples on each side.
Detection thresholds are expressed on ``-2 ln(Lambda)``.
"""
from __future__ import annotations

import functools
import math
from dataclasses import dataclass

import numpy as np
from scipy import stats

MIN_SEGMENT = 5
MIN_SAMPLES = 2 * MIN_SEGMENT


class InsufficientDataError(ValueError):
    pass


@dataclass
class LrtWindow:
    samples: np.ndarray
    split: int
    statistic: float
    threshold: float
    alpha: float


def search_window(mean_interarrival: float, error_range: float, change_index: int,
                  horizon: int | None = None) -> tuple[int, int]:
    """Rounds ``[k*mu_b - delta, k*mu_b + delta]`` around the k-th expected change, clipped to the horizon."""
    if change_index < 1:
        raise ValueError("change index starts at 1")
    centre = change_index * mean_interarrival
    lo, hi = int(round(centre - error_range)), int(round(centre + error_range))
    if horizon is not None:
        lo, hi = max(lo, 1), min(hi, horizon)
    return lo, hi


def _sse(x: np.ndarray) -> float:
    return float(np.sum((x - x.mean()) ** 2))


def lrt_statistic(samples, split: int) -> float:
    x = np.asarray(samples, dtype=float)
    n = len(x)
    if n < MIN_SAMPLES:
        raise InsufficientDataError(f"need at least {MIN_SAMPLES} samples, got {n}")
    if not MIN_SEGMENT <= split <= n - MIN_SEGMENT:
        raise ValueError(f"split {split} not in [{MIN_SEGMENT}, {n - MIN_SEGMENT}]")
    pooled = _sse(x)
    if pooled == 0:
        return 1.0
    ratio = (_sse(x[:split]) + _sse(x[split:])) / pooled
    return ratio ** (n / 2)


def _split_sse(x: np.ndarray) -> np.ndarray:
    """Two-segment SSE for every admissible split of the full series (index 0 -> split 5)."""
    n = len(x)
    x = x - x.mean()  # conditioning only; SSEs are shift invariant
    s1 = np.concatenate(([0.0], np.cumsum(x)))
    s2 = np.concatenate(([0.0], np.cumsum(x * x)))
    k = np.arange(MIN_SEGMENT, n - MIN_SEGMENT + 1)
    left = s2[k] - s1[k] ** 2 / k
    right = (s2[n] - s2[k]) - (s1[n] - s1[k]) ** 2 / (n - k)
    return np.maximum(left + right, 0.0)


def best_split(samples) -> int:
    """Admissible split minimising the two-segment residual variance (smallest on ties)."""
    x = np.asarray(samples, dtype=float)
    if len(x) < MIN_SAMPLES:
        raise InsufficientDataError(f"need at least {MIN_SAMPLES} samples, got {len(x)}")
    sse = _split_sse(x)
    # ties up to rounding noise resolve to the earliest split
    return MIN_SEGMENT + int(np.flatnonzero(sse <= sse.min() * (1 + 1e-12) + 1e-300)[0])


def log_lrt(samples) -> float:
    """``-2 ln Lambda`` at the best split; ``inf`` when the split explains all variance."""
    x = np.asarray(samples, dtype=float)
    pooled = _sse(x)
    if pooled == 0:
        return 0.0
    split = _split_sse(x).min()
    if split <= 0:
        return math.inf
    return len(x) * math.log(pooled / split)


def prefix_scan(samples) -> np.ndarray:
    """``-2 ln Lambda`` at the best split of every prefix ``x[:n]``, ``n >= 10``.

    Entry ``i`` corresponds to the prefix of length ``i + 10``; this is what a sequential
    test recomputes as each new sample arrives.
    """
    x = np.asarray(samples, dtype=float)
    n = len(x)
    if n < MIN_SAMPLES:
        return np.empty(0)
    x = x - x.mean()
    s1 = np.concatenate(([0.0], np.cumsum(x)))
    s2 = np.concatenate(([0.0], np.cumsum(x * x)))
    k = np.arange(MIN_SEGMENT, n - MIN_SEGMENT + 1)
    t = np.arange(MIN_SAMPLES, n + 1)
    lengths = (t[:, None] - k[None, :]).astype(float)
    with np.errstate(divide="ignore", invalid="ignore"):
        right = s1[t][:, None] - s1[k][None, :]
        np.square(right, out=right)
        np.divide(right, lengths, out=right)
        split = (s2[t][:, None] - s2[k][None, :]) - right
        split += (s2[k] - s1[k] ** 2 / k)[None, :]
        split[lengths < MIN_SEGMENT] = np.inf
        split = np.maximum(split.min(axis=1), 0.0)
        pooled = np.maximum(s2[t] - s1[t] ** 2 / t, 0.0)
        out = t * np.log(pooled / split)
    flat = pooled <= 1e-12 * np.maximum(s2[t], 1e-300)
    out[flat] = 0.0
    out[(split <= 0) & ~flat] = np.inf
    return out


def chi2_threshold(alpha: float) -> float:
    """Per-test critical value of ``-2 ln Lambda`` from Wilks' chi-square(1) approximation."""
    return float(stats.chi2.isf(alpha, df=1))


# backlog rates at which queue-model null thresholds are tabulated
BACKLOG_GRID = (0.5, 1.0, 1.5, 2.0, 3.0, 4.0, 5.0, 7.0, 10.0, 15.0, 20.0, 30.0, 50.0)


def estimate_backlog_rate(samples) -> float:
    """Method-of-moments backlog rate of a compound Poisson-exponential sample.

    mean = lambda*mu and var = 2*lambda*mu^2, so lambda = 2*mean^2/var.
    """
    x = np.asarray(samples, dtype=float)
    var = x.var(ddof=1) if len(x) > 1 else 0.0
    if var <= 0:
        return math.inf
    return 2.0 * x.mean() ** 2 / var


def snap_backlog_rate(rate: float) -> float | None:
    """Largest tabulated rate not above ``rate`` (a lower rate gives a larger, safer threshold).

    Returns ``None`` beyond the grid, where the normal null is adequate.
    """
    if rate > BACKLOG_GRID[-1]:
        return None
    below = [g for g in BACKLOG_GRID if g <= rate]
    return below[-1] if below else BACKLOG_GRID[0]


@functools.lru_cache(maxsize=64)
def calibrate_threshold(alpha: float, n_samples: int, trials: int = 500, seed: int = 0,
                        backlog_rate: float | None = None) -> float:
    """Monte-Carlo critical value for the whole sequential scan of ``n_samples`` points.

    The returned ``c`` satisfies ``P(max_n scan(x[:n]) > c) = alpha`` under no change. The
    statistic is location/scale free, so the null needs no mean or scale: standard normal
    series by default, or Poisson-exponential waits with the given backlog rate (whose
    law, up to scale, depends on that rate only).
    """
    rng = np.random.default_rng(seed)
    if backlog_rate is None:
        draw = lambda: rng.standard_normal(n_samples)  # noqa: E731
    else:
        draw = lambda: rng.gamma(rng.poisson(backlog_rate, n_samples), 1.0)  # noqa: E731
    maxima = np.array([prefix_scan(draw()).max() for _ in range(trials)])
    return float(np.quantile(maxima, 1.0 - alpha))


def detect(rounds, costs, threshold: float) -> int | None:
    """First round at which ``-2 ln Lambda`` over the samples seen so far exceeds ``threshold``."""
    rounds = np.asarray(rounds)
    scan = prefix_scan(costs)
    hits = np.flatnonzero(scan > threshold)
    if hits.size == 0:
        return None
    return int(rounds[hits[0] + MIN_SAMPLES - 1])


class SequentialLRT:
    """Online form of :func:`detect`: feed samples one at a time."""

    def __init__(self, threshold: float):
        self.threshold = threshold
        self.samples: list[float] = []
        self.declared: int | None = None

    def push(self, round: int, cost: float) -> bool:
        if self.declared is not None:
            return True
        self.samples.append(cost)
        if len(self.samples) >= MIN_SAMPLES and log_lrt(self.samples) > self.threshold:
            self.declared = round
            return True
        return False

    def window(self, alpha: float = float("nan")) -> LrtWindow:
        x = np.asarray(self.samples)
        split = best_split(x)
        return LrtWindow(x, split, lrt_statistic(x, split), self.threshold, alpha)


@dataclass(frozen=True)
class ChangePointDetector:
    """Prior-guided detector: expected inter-arrival and error range narrow the LRT to a window.

    ``null`` picks how the critical value is obtained:

    * ``"queue"``: Monte-Carlo under Poisson-exponential waits, with the backlog rate
      estimated from reference samples known to precede the change;
    * ``"normal"``: Monte-Carlo under Gaussian noise;
    * ``"wilks"``: the per-test chi-square(1) quantile (ignores the scan over splits and time).

    A fixed ``threshold`` overrides all of these.
    """

    mean_interarrival: float
    error_range: float
    alpha: float = 0.05
    null: str = "queue"
    trials: int = 500
    seed: int = 0
    threshold: float | None = None

    def __post_init__(self):
        if self.null not in ("queue", "normal", "wilks"):
            raise ValueError(f"unknown null model {self.null!r}")

    @property
    def window_length(self) -> int:
        return max(int(2 * self.error_range) + 1, MIN_SAMPLES)

    def threshold_for(self, reference=None) -> float:
        if self.threshold is not None:
            return self.threshold
        if self.null == "wilks":
            return chi2_threshold(self.alpha)
        rate = None
        if self.null == "queue" and reference is not None and len(reference) >= MIN_SAMPLES:
            rate = snap_backlog_rate(estimate_backlog_rate(reference))
        return calibrate_threshold(self.alpha, self.window_length, self.trials, self.seed, rate)

    def n_windows(self, horizon: int) -> int:
        k = 0
        while (k + 1) * self.mean_interarrival < horizon:
            k += 1
        return k

    def window(self, change_index: int, horizon: int) -> tuple[int, int]:
        return search_window(self.mean_interarrival, self.error_range, change_index, horizon)

    def detect(self, rounds, costs, reference=None) -> int | None:
        return detect(rounds, costs, self.threshold_for(reference))
