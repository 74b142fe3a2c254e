"""Emit a standalone matplotlib script that draws the learning curves of a
finished run directory."""

from __future__ import annotations

import json
from pathlib import Path

from .metrics import CSV_COLUMNS

SCRIPT_NAME = "plot_results.py"

EXPECTED = {
    "compose-eval": "compose/<target>/<method>/trialNN.csv",
    "repr-eval": "repr/<representation>/trialNN.csv",
    "lifelong": "lifelong/<arm>/phaseK.csv",
    "single": "single/trialNN.csv",
}


class PlotError(RuntimeError):
    pass


_TEMPLATE = r'''#!/usr/bin/env python3
"""Learning curves for the run stored next to this script.

Each curve is the running mean (window WINDOW) of steps-to-complete over
training episodes, interpolated on a common step grid and averaged over
trials; the band is one standard deviation (omitted for a single trial).
"""

import csv
import json
import sys
from collections import defaultdict
from pathlib import Path

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt
import numpy as np

HERE = Path(__file__).resolve().parent
WINDOW = 20
COLUMNS = COLUMNS_PLACEHOLDER


def load(path):
    with open(path, newline="") as fh:
        rows = list(csv.DictReader(fh))
    if rows and tuple(rows[0].keys()) != COLUMNS:
        sys.exit(f"{path}: unexpected columns")
    return rows


def curves(rows, cap):
    """trial -> (env steps, running mean of steps-to-complete)."""
    per_trial = defaultdict(list)
    for r in rows:
        if r["episode_steps"] == "":
            continue
        steps = int(r["episode_steps"]) if r["success_flag"] == "1" else cap
        per_trial[r["trial"]].append((int(r["env_steps_cumulative"]), steps))
    out = {}
    for trial, pts in per_trial.items():
        xs = np.array([p[0] for p in pts], float)
        ys = np.array([p[1] for p in pts], float)
        c = np.cumsum(np.insert(ys, 0, 0.0))
        lo = np.maximum(0, np.arange(1, len(ys) + 1) - WINDOW)
        out[trial] = (xs, (c[1:] - c[lo]) / (np.arange(1, len(ys) + 1) - lo))
    return out


def draw(ax, rows, label, cap):
    per_trial = curves(rows, cap)
    if not per_trial:
        return
    hi = max(xs[-1] for xs, _ in per_trial.values())
    lo = min(xs[0] for xs, _ in per_trial.values())
    grid = np.linspace(lo, hi, 200)
    ys = np.array([np.interp(grid, xs, y) for xs, y in per_trial.values()])
    mean = ys.mean(axis=0)
    (line,) = ax.plot(grid, mean, label=label)
    if len(ys) > 1:
        sd = ys.std(axis=0, ddof=1)
        ax.fill_between(grid, mean - sd, mean + sd, color=line.get_color(), alpha=0.2)


def main():
    meta = json.loads((HERE / "metadata.json").read_text())
    mode, cap = meta["mode"], meta["params"]["episode_cap"]
    if mode == "compose-eval":
        groups = defaultdict(list)
        for name in meta["targets"]:
            groups[name.split("_")[0]].append(name)
        ops = [op for op in ("and", "or", "then") if op in groups]
        n_rows = max(len(v) for v in groups.values())
        fig, axes = plt.subplots(n_rows, len(ops), figsize=(5 * len(ops), 3.2 * n_rows), squeeze=False)
        for j, op in enumerate(ops):
            for i in range(n_rows):
                ax = axes[i][j]
                if i >= len(groups[op]):
                    ax.axis("off")
                    continue
                target = groups[op][i]
                for method in meta["methods"]:
                    rows = [r for p in sorted((HERE / "compose" / target / method).glob("trial*.csv"))
                            for r in load(p)]
                    draw(ax, rows, method, cap)
                ax.set_title(target)
                ax.set_xlabel("training steps")
                ax.set_ylabel("steps to complete")
        axes[0][0].legend()
    elif mode == "repr-eval":
        fig, ax = plt.subplots(figsize=(6, 4))
        for rep in meta["representations"]:
            rows = [r for p in sorted((HERE / "repr" / rep).glob("trial*.csv")) for r in load(p)]
            draw(ax, rows, rep, cap)
        ax.set_xlabel("training steps")
        ax.set_ylabel("steps to complete")
        ax.legend()
    elif mode == "lifelong":
        n = len(meta["phases"])
        fig, axes = plt.subplots(1, n, figsize=(4.5 * n, 3.5), squeeze=False)
        for k in range(1, n + 1):
            ax = axes[0][k - 1]
            for arm in meta["arms"]:
                path = HERE / "lifelong" / arm / f"phase{k}.csv"
                if path.exists():
                    draw(ax, load(path), arm, cap)
            ax.set_title(f"phase {k}")
            ax.set_xlabel("training steps")
        axes[0][0].set_ylabel("steps to complete")
        axes[0][0].legend()
    else:
        fig, ax = plt.subplots(figsize=(6, 4))
        rows = [r for p in sorted((HERE / "single").glob("trial*.csv")) for r in load(p)]
        draw(ax, rows, "qrm", cap)
        ax.set_xlabel("training steps")
        ax.set_ylabel("steps to complete")
    fig.tight_layout()
    out = HERE / f"{mode}.png"
    fig.savefig(out, dpi=120)
    print(out)


if __name__ == "__main__":
    main()
'''


def emit_plots(directory) -> Path:
    """Check that ``directory`` holds a finished run and write the plotting
    script into it.  Returns the script path."""
    d = Path(directory)
    if not d.is_dir():
        raise PlotError(f"{d} is not a directory")
    meta_path = d / "metadata.json"
    if not meta_path.exists():
        listing = "\n  ".join(["metadata.json"] + [f"{m}: {p}" for m, p in EXPECTED.items()])
        raise PlotError(f"{d} does not look like a run directory; expected files:\n  {listing}")
    try:
        meta = json.loads(meta_path.read_text(encoding="utf-8"))
        mode = meta["mode"]
    except (json.JSONDecodeError, KeyError) as exc:
        raise PlotError(f"{meta_path}: corrupt metadata ({exc})") from None
    if mode not in EXPECTED:
        raise PlotError(f"{meta_path}: unknown mode {mode!r}")
    top = EXPECTED[mode].split("/")[0]
    csvs = sorted((d / top).rglob("*.csv"))
    if not csvs:
        raise PlotError(f"no CSV files under {d / top}; expected {EXPECTED[mode]}")
    for p in csvs:
        with open(p, encoding="utf-8") as fh:
            header = fh.readline().strip().split(",")
        if tuple(header) != CSV_COLUMNS:
            raise PlotError(f"{p}: corrupt CSV header {header}")
    script = d / SCRIPT_NAME
    script.write_text(_TEMPLATE.replace("COLUMNS_PLACEHOLDER", repr(CSV_COLUMNS)), encoding="utf-8")
    return script
