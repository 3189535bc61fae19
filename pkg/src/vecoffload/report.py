"""CSV/JSON output of an experiment: per-round log, summary, and one table per figure."""
from __future__ import annotations

import csv
import json
from pathlib import Path

import numpy as np

from .simulation import ExperimentReport

ROUND_COLUMNS = ("seed", "round", "policy", "network", "bs", "wait_s", "regret_s", "lost", "lost_relay",
                 "available_all")
FIGURE_FILES = {
    "average_regret": "fig_average_regret.csv",
    "selection": "fig_selection.csv",
    "interval_regret": "fig_interval_regret.csv",
    "waiting_time": "fig_waiting_time.csv",
    "task_loss": "fig_task_loss.csv",
}


def _num(x) -> str:
    return repr(float(x))


def _write(path: Path, header, rows) -> None:
    with open(path, "w", newline="", encoding="utf-8") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(header)
        w.writerows(rows)


def write_rounds(report: ExperimentReport, path: Path) -> None:
    def rows():
        for seed in report.seeds:
            for p in report.policies:
                t = report.trace(p, seed)
                cols = zip(t.network.tolist(), t.bs.tolist(), t.wait.tolist(), t.regret.tolist(),
                           t.lost.tolist(), t.lost_relay.tolist(), t.available_all.tolist())
                for r, (m, b, w, g, lo, lr, av) in enumerate(cols, start=1):
                    yield seed, r, p, m, b, repr(w), repr(g), int(lo), int(lr), int(av)

    _write(path, ROUND_COLUMNS, rows())


def write_figures(report: ExperimentReport, out: Path) -> None:
    pols = report.policies
    has = bool(report.seeds)
    avg = {p: report.average_regret_series(p) for p in pols} if has else {}
    cum = {p: report.cumulative_regret_series(p) for p in pols} if has else {}
    _write(out / FIGURE_FILES["average_regret"],
           ["round", *(f"{p}_average" for p in pols), *(f"{p}_cumulative" for p in pols)],
           ([r + 1, *(_num(avg[p][r]) for p in pols), *(_num(cum[p][r]) for p in pols)]
            for r in range(report.horizon if has else 0)))
    sel_rows, int_rows = [], []
    for p in pols if has else []:
        for k, fr in enumerate(report.selection_fractions(p)):
            sel_rows += [[p, k + 1, m, _num(f)] for m, f in enumerate(fr)]
        int_rows += [[p, k + 1, _num(v)] for k, v in enumerate(report.interval_regret(p))]
    _write(out / FIGURE_FILES["selection"], ["policy", "interval", "network", "fraction"], sel_rows)
    _write(out / FIGURE_FILES["interval_regret"], ["policy", "interval", "average_regret"], int_rows)
    _write(out / FIGURE_FILES["waiting_time"], ["policy", "mean_wait_s"],
           [[p, _num(report.mean_wait(p))] for p in pols] if has else [])
    _write(out / FIGURE_FILES["task_loss"], ["policy", "lost", "lost_relay"],
           [[p, *map(_num, report.loss_counts(p))] for p in pols] if has else [])


def emit_report(report: ExperimentReport, path: str | Path, format: str = "both") -> list[Path]:
    """Write ``rounds.csv`` and figure tables (csv), ``summary.json`` (json), or both into ``path``."""
    if format not in ("csv", "json", "both"):
        raise ValueError(f"unknown format {format!r}")
    out = Path(path)
    out.mkdir(parents=True, exist_ok=True)
    written = []
    if format in ("csv", "both"):
        write_rounds(report, out / "rounds.csv")
        write_figures(report, out)
        written += [out / "rounds.csv", *(out / f for f in FIGURE_FILES.values())]
    if format in ("json", "both"):
        (out / "summary.json").write_text(json.dumps(report.summary(), indent=2, sort_keys=True) + "\n",
                                          encoding="utf-8")
        written.append(out / "summary.json")
    return written


def load_summary(path: str | Path) -> dict:
    p = Path(path)
    if p.is_dir():
        p = p / "summary.json"
    return json.loads(p.read_text(encoding="utf-8"))


def load_rounds(path: str | Path) -> dict[str, np.ndarray]:
    """Column arrays of a ``rounds.csv`` file."""
    p = Path(path)
    if p.is_dir():
        p = p / "rounds.csv"
    with open(p, newline="", encoding="utf-8") as fh:
        rows = list(csv.DictReader(fh))
    kinds = {"policy": str, "wait_s": float, "regret_s": float}
    return {c: np.array([kinds.get(c, int)(r[c]) for r in rows]) for c in ROUND_COLUMNS}
