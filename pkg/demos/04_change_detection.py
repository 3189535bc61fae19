"""Spotting a shift in waiting-time statistics with a scanned likelihood-ratio test."""
import numpy as np

from vecoffload.changepoint import ChangePointDetector, prefix_scan
from vecoffload.edge_queue import sample_waits

rng = np.random.default_rng(3)
rounds = np.arange(4500, 5501)
# the observed network goes from (3, 0.3) to (10, 0.5) at round 5030
lam = np.where(rounds < 5030, 3, 10)
mu = np.where(rounds < 5030, 0.3, 0.5)
waits = sample_waits(lam, mu, rng)
history = sample_waits(3, 0.3, rng, size=400)  # pre-change reference for the null

det = ChangePointDetector(mean_interarrival=5000, error_range=500, alpha=0.05, trials=300)
c = det.threshold_for(history)
print(f"critical value at alpha=0.05: {c:.2f}")
print("declared change at round", det.detect(rounds, waits, reference=history))

scan = prefix_scan(waits)
print(f"statistic 20 samples in: {scan[0]:.2f}, at the end: {scan[-1]:.1f}")

# same test on a stationary stretch should usually stay quiet
quiet = sample_waits(3, 0.3, rng, size=rounds.size)
print("stationary series ->", det.detect(rounds, quiet, reference=history))
