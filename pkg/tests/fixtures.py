"""Small scenarios shared by the harness, report and CLI tests."""
import dataclasses

from vecoffload.config import default_config
from vecoffload.core import PolicyConfig, TrafficSchedule

TABLE2 = [
    [[7, 0.4], [3, 0.3], [10, 0.5]],
    [[3, 0.3], [10, 0.5], [7, 0.4]],
    [[10, 0.5], [7, 0.4], [3, 0.3]],
    [[3, 0.3], [10, 0.5], [7, 0.4]],
    [[7, 0.4], [10, 0.5], [3, 0.3]],
]


def small_config(horizon=400, change=200, seed=0, **kw):
    sched = TrafficSchedule.from_boundaries([change], horizon, TABLE2[:2], change, 40)
    return dataclasses.replace(default_config(), schedule=sched, seed=seed,
                               policy=PolicyConfig(calibration_trials=50), **kw)


GOLDEN = dict(horizon=60, change=30)
GOLDEN_POLICIES = ["sw-ucb", "random"]
