"""Waiting time at an edge server: a Poisson backlog, each job served in exponential time."""
import numpy as np

from vecoffload.edge_queue import QueueModel, expected_wait, sample_wait, wait_variance

rng = np.random.default_rng(7)

# the three tiers in the first traffic interval
tiers = {"Macro": QueueModel(7, 0.4), "Micro": QueueModel(3, 0.3), "Pico": QueueModel(10, 0.5)}

for name, q in tiers.items():
    w = sample_wait(q, rng, size=200_000)
    print(f"{name:>5}: E[w]={expected_wait(q):.2f}s  sample mean={w.mean():.3f}s  "
          f"var={wait_variance(q):.3f} (sample {w.var():.3f})  P(w=0)={np.mean(w == 0):.4f}")

# Micro is the cheapest here, even though Pico has the lightest per-job service
best = min(tiers, key=lambda k: expected_wait(tiers[k]))
print("cheapest network in expectation:", best)
