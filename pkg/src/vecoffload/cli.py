"""Command-line entry points: ``simulate``, ``offpolicy`` and ``calibrate-lrt``.

Verbosity comes from the ``VECOFFLOAD_LOG_LEVEL`` environment variable.
"""
from __future__ import annotations

import argparse
import json
import logging
import os
import sys
from pathlib import Path

from .changepoint import ChangePointDetector, calibrate_threshold, chi2_threshold
from .config import default_config, load_config
from .offpolicy import LogBook, run_offpolicy
from .report import emit_report
from .simulation import POLICIES, run_experiment

log = logging.getLogger("vecoffload")


def _policies(text: str) -> list[str]:
    names = [p.strip() for p in text.split(",") if p.strip()]
    bad = [p for p in names if p not in POLICIES]
    if bad:
        raise argparse.ArgumentTypeError(f"unknown policies: {', '.join(bad)}; choose from {', '.join(POLICIES)}")
    return names


def _positive(text: str) -> int:
    n = int(text)
    if n < 1:
        raise argparse.ArgumentTypeError("must be a positive integer")
    return n


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="vecoffload", description="Vehicular edge offloading simulator")
    sub = ap.add_subparsers(dest="command", required=True)

    sim = sub.add_parser("simulate", help="run policies over seeded scenarios and write reports")
    sim.add_argument("--config", type=Path, help="YAML scenario (default: packaged scenario)")
    sim.add_argument("--policies", type=_policies, default=list(POLICIES))
    sim.add_argument("--seeds", type=_positive, default=10)
    sim.add_argument("--out", type=Path, required=True)
    sim.add_argument("--format", choices=("csv", "json", "both"), default="both")

    off = sub.add_parser("offpolicy", help="detect change points in logs and fit target policies")
    off.add_argument("--logs", type=Path, required=True, help="JSON-lines log file")
    off.add_argument("--out", type=Path, required=True)
    off.add_argument("--config", type=Path, help="scenario supplying the change-point prior")
    off.add_argument("--alpha", type=float)
    off.add_argument("--epsilon-floor", type=float)

    cal = sub.add_parser("calibrate-lrt", help="Monte-Carlo critical value of the scanned LRT")
    cal.add_argument("--alpha", type=float, default=0.05)
    cal.add_argument("--trials", type=_positive, default=500)
    cal.add_argument("--samples", type=_positive, default=1001, help="window length")
    cal.add_argument("--backlog-rate", type=float, help="queue-wait null with this arrival rate (default Gaussian)")
    cal.add_argument("--seed", type=int, default=0)
    return ap


def _config(path: Path | None):
    return load_config(path) if path else default_config()


def cmd_simulate(args) -> int:
    config = _config(args.config)
    report = run_experiment(config, args.policies, args.seeds)
    for path in emit_report(report, args.out, args.format):
        log.info("wrote %s", path)
    for name, s in report.summary()["policies"].items():
        print(f"{name:>11}  final average regret {s['final_average_regret']:.4f}")
    return 0


def cmd_offpolicy(args) -> int:
    config = _config(args.config)
    sched, pc = config.schedule, config.policy
    alpha = pc.alpha if args.alpha is None else args.alpha
    floor = pc.epsilon_floor if args.epsilon_floor is None else args.epsilon_floor
    logs = LogBook.read_jsonl(args.logs)
    detector = ChangePointDetector(sched.mean_interarrival, sched.error_range, alpha, trials=pc.calibration_trials)
    result = run_offpolicy(logs, detector, epsilon_floor=floor)
    args.out.mkdir(parents=True, exist_ok=True)
    path = args.out / "offpolicy.json"
    path.write_text(json.dumps(result.to_dict(), indent=2) + "\n", encoding="utf-8")
    print(f"intervals {result.intervals}")
    print(f"wrote {path}")
    return 0


def cmd_calibrate(args) -> int:
    thr = calibrate_threshold(args.alpha, args.samples, args.trials, args.seed, args.backlog_rate)
    print(f"alpha={args.alpha} samples={args.samples} trials={args.trials} threshold={thr:.4f} "
          f"(chi2(1) quantile {chi2_threshold(args.alpha):.4f})")
    return 0


def main(argv=None) -> int:
    logging.basicConfig(level=os.environ.get("VECOFFLOAD_LOG_LEVEL", "WARNING").upper(),
                        format="%(asctime)s %(levelname)s %(name)s: %(message)s")
    args = build_parser().parse_args(argv)
    handler = {"simulate": cmd_simulate, "offpolicy": cmd_offpolicy, "calibrate-lrt": cmd_calibrate}[args.command]
    try:
        return handler(args)
    except (ValueError, KeyError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
