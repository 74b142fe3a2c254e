"""Experiment runners: composition, representation, lifelong and single runs.

Each trial is independent (own memory, own generator seeded from
``(seed, trial, ...)``) so trials can run in worker processes; the parent
collects the results, writes files in a fixed order and aggregates.
All arms of one trial draw from identically seeded generators.
"""

from __future__ import annotations

import json
import logging
import os
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from pathlib import Path
from typing import Callable, Optional

import numpy as np

from .. import __version__
from ..envs import LabeledGridEnv
from ..learning import PRESETS, CompositionMapping, Memory, lifelong_update
from ..reward_machine import to_dot, to_json
from ..sltl import canonical_string, unlearned_count
from . import metrics as M
from .config import COMPOSE_METHODS, LIFELONG_ARMS, ConfigError, ExperimentConfig

log = logging.getLogger(__name__)

BASELINE_NOTE = ("qrm and qrm-rs start every phase from an empty memory, so every task "
                 "is learned from scratch (tasks never repeat across phases)")


@dataclass
class TrialResult:
    trial: int
    # relative CSV path -> rows; several trials may contribute to one file
    tables: dict = field(default_factory=dict)
    # relative path -> file text
    artifacts: dict = field(default_factory=dict)
    # (group, arm) -> PhaseMetrics
    runs: dict = field(default_factory=dict)
    extra: dict = field(default_factory=dict)


@dataclass
class RunResult:
    config: ExperimentConfig
    trials: list
    summary: dict
    output_dir: Optional[Path] = None

    def values(self, group, arm, stat: Callable) -> list:
        """``stat(PhaseMetrics)`` for every trial of one (group, arm) cell."""
        return [stat(t.runs[(group, arm)]) for t in self.trials]


def _env(cfg: ExperimentConfig) -> LabeledGridEnv:
    return LabeledGridEnv.shipped(cfg.domain_info["map"])


def _empty(env) -> Memory:
    return Memory.empty(env.alphabet, env.n_states, env.n_actions)


def _rng(cfg: ExperimentConfig, trial: int, *tail: int) -> np.random.Generator:
    return np.random.default_rng([cfg.seed, trial, *tail])


def _pretrain(cfg, env, sources: dict, trial: int, result: TrialResult) -> Memory:
    memory = _empty(env)
    budget = cfg.budget("pretrain")
    pm = lifelong_update(memory, list(sources.values()), env, cfg.learn_params(), PRESETS["none"],
                         budget, _rng(cfg, trial, 0))
    result.tables.setdefault("pretrain.csv", []).extend(
        M.phase_rows(trial, 0, pm, _names(sources)))
    return memory


def _names(tasks: dict) -> dict:
    return {str(f): name for name, f in tasks.items()}


# -- composition ----------------------------------------------------------------


def _compose_trial(cfg: ExperimentConfig, trial: int) -> TrialResult:
    env = _env(cfg)
    result = TrialResult(trial)
    memory = _pretrain(cfg, env, cfg.source_tasks(), trial, result)
    budget = cfg.budget("target")
    every = cfg.eval_interval(budget)
    methods = cfg.methods or list(COMPOSE_METHODS) + ["qrm", "qrm-rs"]
    for ti, (name, target) in enumerate(cfg.target_tasks().items()):
        for method in methods:
            if method in COMPOSE_METHODS:
                mem, mapping, params = memory.copy(), CompositionMapping.uniform(method), cfg.learn_params()
            else:
                mem, mapping = _empty(env), PRESETS["none"]
                params = cfg.learn_params(use_shaping=method == "qrm-rs")
            pm = lifelong_update(mem, [target], env, params, mapping, budget,
                                 _rng(cfg, trial, 1, ti), eval_every=every)
            result.runs[(name, method)] = pm
            path = f"compose/{name}/{method}/trial{trial:02d}.csv"
            result.tables[path] = M.phase_rows(trial, 1, pm, {str(target): name})
    return result


def run_compose_eval(cfg: ExperimentConfig) -> RunResult:
    return _run(cfg, _compose_trial, _summarize_cells)


# -- representations ------------------------------------------------------------


def _repr_trial(cfg: ExperimentConfig, trial: int) -> TrialResult:
    env = _env(cfg)
    result = TrialResult(trial)
    sources, reps = cfg.repr_setup()
    memory = _pretrain(cfg, env, sources, trial, result)
    budget = cfg.budget("target")
    every = cfg.eval_interval(budget)
    mapping = cfg.composition_mapping()
    result.extra["unlearned"] = {name: unlearned_count(f, memory.learned) for name, f in reps.items()}
    for name, f in reps.items():
        mem = memory.copy()
        pm = lifelong_update(mem, [f], env, cfg.learn_params(), mapping, budget,
                             _rng(cfg, trial, 1), eval_every=every)
        result.runs[("repr", name)] = pm
        result.tables[f"repr/{name}/trial{trial:02d}.csv"] = M.phase_rows(trial, 1, pm, {str(f): name})
    return result


def run_repr_eval(cfg: ExperimentConfig) -> RunResult:
    return _run(cfg, _repr_trial, _summarize_repr)


# -- lifelong -------------------------------------------------------------------


def _lifelong_trial(cfg: ExperimentConfig, trial: int) -> TrialResult:
    env = _env(cfg)
    result = TrialResult(trial)
    schedule = cfg.schedule()
    budget = cfg.budget("phase")
    every = cfg.eval_interval(budget)
    for arm in cfg.arms or LIFELONG_ARMS:
        memory = _empty(env)
        mapping = cfg.mapping_for_arm(arm)
        params = cfg.learn_params(use_shaping=arm == "qrm-rs")
        offset = 0
        for k, phase in enumerate(schedule, start=1):
            if arm in ("qrm", "qrm-rs"):
                memory = _empty(env)
            before = set(memory.learned)
            tasks = dict(phase)
            pm = lifelong_update(memory, list(tasks.values()), env, params, mapping, budget,
                                 _rng(cfg, trial, k), eval_every=every, step_offset=offset)
            offset += pm.env_steps
            result.runs[(k, arm)] = pm
            result.tables.setdefault(f"lifelong/{arm}/phase{k}.csv", []).extend(
                M.phase_rows(trial, k, pm, _names(tasks)))
            if trial == 0 and arm.startswith("lsrm"):
                _snapshot(result, arm, k, memory, before, pm, last=k == len(schedule))
    return result


def _snapshot(result: TrialResult, arm: str, k: int, memory: Memory, before: set, pm, last: bool):
    base = f"lifelong/{arm}/phase{k}"
    unlearned = [u for u in memory.rm.non_terminal_states() if u not in before]
    result.artifacts[f"{base}_rm.json"] = to_json(memory.rm)
    result.artifacts[f"{base}_rm.dot"] = to_dot(memory.rm, highlight=unlearned)
    prov = {canonical_string(u): src for u, src in pm.provenance.items()}
    result.artifacts[f"{base}_provenance.json"] = json.dumps(
        {"new_states": [canonical_string(u) for u in pm.new_states], "transfers": prov},
        indent=2) + "\n"
    if last:
        result.artifacts[f"lifelong/{arm}/memory_final.json"] = memory.to_json()


def run_lifelong(cfg: ExperimentConfig) -> RunResult:
    return _run(cfg, _lifelong_trial, _summarize_cells)


# -- single ---------------------------------------------------------------------


def _single_trial(cfg: ExperimentConfig, trial: int) -> TrialResult:
    env = _env(cfg)
    result = TrialResult(trial)
    tasks = cfg.target_tasks()
    budget = cfg.budget("target")
    pm = lifelong_update(_empty(env), list(tasks.values()), env, cfg.learn_params(),
                         cfg.composition_mapping(), budget, _rng(cfg, trial, 1),
                         eval_every=cfg.eval_interval(budget))
    result.runs[("single", "qrm")] = pm
    result.tables[f"single/trial{trial:02d}.csv"] = M.phase_rows(trial, 1, pm, _names(tasks))
    return result


def run_single(cfg: ExperimentConfig) -> RunResult:
    return _run(cfg, _single_trial, _summarize_cells)


RUNNERS = {
    "compose-eval": run_compose_eval,
    "repr-eval": run_repr_eval,
    "lifelong": run_lifelong,
    "single": run_single,
}


def run_experiment(cfg: ExperimentConfig) -> RunResult:
    return RUNNERS[cfg.mode](cfg)


# -- plumbing -------------------------------------------------------------------


def _call(args):
    fn, cfg, trial = args
    return fn(cfg, trial)


def _run(cfg: ExperimentConfig, trial_fn, summarize) -> RunResult:
    cfg.validate()
    if cfg.seed < 0:
        raise ConfigError("seed must be non-negative")
    n = cfg.n_trials()
    workers = min(n, cfg.workers or os.cpu_count() or 1)
    jobs = [(trial_fn, cfg, t) for t in range(n)]
    log.info("%s: %d trials on %d worker(s)", cfg.mode, n, workers)
    if workers <= 1:
        trials = [_call(j) for j in jobs]
    else:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            trials = list(pool.map(_call, jobs))
    trials.sort(key=lambda t: t.trial)
    result = RunResult(cfg, trials, summarize(cfg, trials))
    if cfg.output_dir:
        result.output_dir = write_outputs(result)
    return result


def _cap(cfg: ExperimentConfig) -> int:
    return cfg.learn_params().episode_cap


def _summarize_cells(cfg: ExperimentConfig, trials: list) -> dict:
    cap = _cap(cfg)
    cells: dict = {}
    for t in trials:
        for key, pm in t.runs.items():
            cells.setdefault(key, []).append(pm)
    out = {}
    for (group, arm), runs in cells.items():
        steps = [M.mean_steps(pm, cap) for pm in runs]
        final_window = [float(M.running_mean(pm.steps_to_complete(cap))[-1]) if pm.episodes else float(cap)
                        for pm in runs]
        mean, sd = M.mean_sd(steps)
        out.setdefault(str(group), {})[arm] = {
            "mean_steps": mean,
            "sd_steps": sd,
            "per_trial": steps,
            "final_window_mean": float(np.mean(final_window)),
            "episodes": [len(pm.episodes) for pm in runs],
        }
    return out


def _summarize_repr(cfg: ExperimentConfig, trials: list) -> dict:
    out = _summarize_cells(cfg, trials)
    out["unlearned"] = trials[0].extra["unlearned"] if trials else {}
    return out


def write_outputs(result: RunResult) -> Path:
    cfg = result.config
    out = Path(cfg.output_dir)
    out.mkdir(parents=True, exist_ok=True)
    tables: dict = {}
    artifacts: dict = {}
    for t in result.trials:
        for path, rows in t.tables.items():
            tables.setdefault(path, []).extend(rows)
        artifacts.update(t.artifacts)
    for path in sorted(tables):
        M.write_csv(out / path, tables[path])
    for path in sorted(artifacts):
        p = out / path
        p.parent.mkdir(parents=True, exist_ok=True)
        p.write_text(artifacts[path], encoding="utf-8")
    (out / "metadata.json").write_text(json.dumps(metadata(cfg), indent=2) + "\n", encoding="utf-8")
    (out / "summary.json").write_text(json.dumps(result.summary, indent=2, sort_keys=True) + "\n",
                                      encoding="utf-8")
    return out


def metadata(cfg: ExperimentConfig) -> dict:
    params = cfg.learn_params()
    meta = {
        "version": __version__,
        "domain": cfg.domain,
        "mode": cfg.mode,
        "scale": cfg.scale,
        "scale_note": ("paper-scale budgets and trial count" if cfg.scale == "paper" else
                       "desk scale: reduced trials and budgets, not comparable in absolute terms"),
        "trials": cfg.n_trials(),
        "seed": cfg.seed,
        "params": {"epsilon": params.epsilon, "gamma": params.gamma, "alpha": params.alpha,
                   "episode_cap": params.episode_cap},
        "csv_columns": list(M.CSV_COLUMNS),
        "steps_to_complete": "episode length on success, episode cap otherwise",
    }
    if cfg.mode == "compose-eval":
        meta["budgets"] = {"pretrain": cfg.budget("pretrain"), "target": cfg.budget("target")}
        meta["eval_every"] = cfg.eval_interval(cfg.budget("target"))
        meta["sources"] = {k: str(v) for k, v in cfg.source_tasks().items()}
        meta["targets"] = {k: str(v) for k, v in cfg.target_tasks().items()}
        meta["methods"] = cfg.methods or list(COMPOSE_METHODS) + ["qrm", "qrm-rs"]
    elif cfg.mode == "repr-eval":
        sources, reps = cfg.repr_setup()
        meta["budgets"] = {"pretrain": cfg.budget("pretrain"), "target": cfg.budget("target")}
        meta["eval_every"] = cfg.eval_interval(cfg.budget("target"))
        meta["sources"] = {k: str(v) for k, v in sources.items()}
        meta["representations"] = {k: str(v) for k, v in reps.items()}
        meta["mapping"] = cfg.composition_mapping().as_dict()
    elif cfg.mode == "lifelong":
        meta["phase_budget"] = cfg.budget("phase")
        meta["eval_every"] = cfg.eval_interval(cfg.budget("phase"))
        meta["phases"] = [{name: str(f) for name, f in phase} for phase in cfg.schedule()]
        meta["arms"] = {arm: cfg.mapping_for_arm(arm).as_dict() for arm in cfg.arms or LIFELONG_ARMS}
        meta["baseline_reset"] = BASELINE_NOTE
    else:
        meta["budget"] = cfg.budget("target")
        meta["eval_every"] = cfg.eval_interval(cfg.budget("target"))
        meta["tasks"] = {k: str(v) for k, v in cfg.target_tasks().items()}
        meta["mapping"] = cfg.composition_mapping().as_dict()
    return meta
