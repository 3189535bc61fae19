"""Learning from logged history: find change points, then fit one policy per interval by IPS."""
import dataclasses

from vecoffload.config import default_config
from vecoffload.core import PolicyConfig
from vecoffload.simulation import Environment, fit_offpolicy, offpolicy_logs

cfg = dataclasses.replace(default_config(), policy=PolicyConfig(calibration_trials=200))
env = Environment.build(cfg, seed=0)
logs = offpolicy_logs(env)
print(f"{len(logs)} logged rounds, min propensity {logs.propensities.min():.4f}")

res = fit_offpolicy(env, logs)
print("true change points:", list(cfg.schedule.change_points))
print("detected         :", res.detections)
for (lo, hi), pol, v, tv in zip(res.intervals, res.policies, res.values, res.true_values):
    print(f"  [{lo:5d}, {hi:5d})  policy {pol.probs.round(3)}  IPS {v:.3f}  true {tv:.3f}")
print(f"regret of the fitted policies: {res.regret:.1f}")
