"""End-to-end run: every policy over several seeds, then CSV/JSON reports.

The full 25000-round scenario takes about a second per seed and policy.
"""
import sys
import tempfile

from vecoffload.config import default_config
from vecoffload.report import emit_report, load_summary
from vecoffload.simulation import POLICIES, run_experiment

seeds = int(sys.argv[1]) if len(sys.argv) > 1 else 2
report = run_experiment(default_config(), POLICIES, seeds)

out = tempfile.mkdtemp(prefix="vecoffload-")
for path in emit_report(report, out):
    print("wrote", path)

summary = load_summary(out)
for name, s in sorted(summary["policies"].items(), key=lambda kv: kv[1]["final_average_regret"]):
    print(f"{name:>11}  regret {s['final_average_regret']:.3f}")
