"""Metric rows, CSV output and the summary statistics used in reports.

CSV columns (one row per training episode or greedy evaluation)::

    trial, phase, task, episode, env_steps_cumulative,
    episode_steps, success_flag, eval_steps

Training rows leave ``eval_steps`` empty; evaluation rows leave
``episode`` and ``episode_steps`` empty.  ``env_steps_cumulative`` counts
environment steps since the start of the run (across phases).
"""

from __future__ import annotations

import csv
import io
import math
from pathlib import Path
from typing import Iterable, Sequence

import numpy as np
from scipy import stats

from ..learning import PhaseMetrics

CSV_COLUMNS = (
    "trial",
    "phase",
    "task",
    "episode",
    "env_steps_cumulative",
    "episode_steps",
    "success_flag",
    "eval_steps",
)
RUNNING_WINDOW = 20


def phase_rows(trial: int, phase: int, metrics: PhaseMetrics, names: dict | None = None) -> list[tuple]:
    """Rows for one phase, sorted by env step with training before evaluation."""
    names = names or {}
    rows = []
    for e in metrics.episodes:
        rows.append((e.env_steps, 0, (trial, phase, names.get(e.task, e.task), e.episode,
                                      e.env_steps, e.episode_steps, int(e.success), "")))
    for i, e in enumerate(metrics.evals):
        rows.append((e.env_steps, 1 + i, (trial, phase, names.get(e.task, e.task), "",
                                          e.env_steps, "", int(e.success), e.eval_steps)))
    rows.sort(key=lambda r: (r[0], r[1]))
    return [r[2] for r in rows]


def write_csv(path: Path, rows: Iterable[Sequence]) -> None:
    path.parent.mkdir(parents=True, exist_ok=True)
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(CSV_COLUMNS)
    w.writerows(rows)
    path.write_text(buf.getvalue(), encoding="utf-8")


def read_csv(path: Path) -> list[dict]:
    with open(path, newline="", encoding="utf-8") as fh:
        reader = csv.DictReader(fh)
        if tuple(reader.fieldnames or ()) != CSV_COLUMNS:
            raise ValueError(f"{path}: unexpected columns {reader.fieldnames}")
        return list(reader)


# -- summaries -------------------------------------------------------------------


def steps_to_complete(metrics: PhaseMetrics, cap: int) -> np.ndarray:
    return np.asarray(metrics.steps_to_complete(cap), dtype=float)


def mean_steps(metrics: PhaseMetrics, cap: int) -> float:
    """Average steps to complete over every training episode of a run.

    A failed or capped episode counts as ``cap`` steps.  With no finished
    episode at all the run never completed its task, which also counts as
    ``cap``.
    """
    s = steps_to_complete(metrics, cap)
    return float(s.mean()) if len(s) else float(cap)


def running_mean(values: Sequence[float], window: int = RUNNING_WINDOW) -> np.ndarray:
    v = np.asarray(values, dtype=float)
    if len(v) == 0:
        return v
    c = np.cumsum(np.insert(v, 0, 0.0))
    out = np.empty(len(v))
    for i in range(len(v)):
        lo = max(0, i + 1 - window)
        out[i] = (c[i + 1] - c[lo]) / (i + 1 - lo)
    return out


def eval_curve(metrics: PhaseMetrics) -> tuple[np.ndarray, np.ndarray]:
    """(env step, greedy steps averaged over the phase's tasks) per evaluation."""
    points: dict[int, list] = {}
    for e in metrics.evals:
        points.setdefault(e.env_steps, []).append(e.eval_steps)
    xs = np.array(sorted(points))
    return xs, np.array([np.mean(points[x]) for x in xs])


def pooled_sd(a: Sequence[float], b: Sequence[float]) -> float:
    a, b = np.asarray(a, float), np.asarray(b, float)
    va = a.var(ddof=1) if len(a) > 1 else 0.0
    vb = b.var(ddof=1) if len(b) > 1 else 0.0
    return math.sqrt((va + vb) / 2.0)


def welch_p(a: Sequence[float], b: Sequence[float]) -> float:
    """Two-sided Welch t-test p-value; identical samples give 1."""
    a, b = np.asarray(a, float), np.asarray(b, float)
    if np.array_equal(np.sort(a), np.sort(b)):
        return 1.0
    if a.var() == 0 and b.var() == 0:
        return 0.0
    return float(stats.ttest_ind(a, b, equal_var=False).pvalue)


def mean_sd(values: Sequence[float]) -> tuple[float, float]:
    v = np.asarray(values, float)
    return float(v.mean()), float(v.std(ddof=1)) if len(v) > 1 else 0.0
