"""Experiment configuration: a JSON file plus command-line overrides."""

from __future__ import annotations

import dataclasses
import json
from dataclasses import dataclass, field
from pathlib import Path
from typing import Optional

from ..learning import PRESETS, CompositionMapping, LearnParams
from ..sltl import parse
from . import presets

MODES = ("compose-eval", "repr-eval", "lifelong", "single")
SCALES = ("desk", "paper")
COMPOSE_METHODS = ("average", "max", "left", "right")
LIFELONG_ARMS = ("lsrm-best", "lsrm-worst", "qrm", "qrm-rs")


class ConfigError(ValueError):
    pass


@dataclass
class ExperimentConfig:
    domain: str = "office"
    mode: str = "lifelong"
    scale: str = "desk"
    # a table name from presets.TASK_TABLES or a {name: formula} mapping
    tasks: object = None
    sources: object = None
    # a schedule name from presets.PHASE_TABLES or a list of task-name lists
    phases: object = None
    representations: Optional[dict] = None
    phase_budget: Optional[int] = None
    pretrain_budget: Optional[int] = None
    trials: Optional[int] = None
    seed: int = 0
    params: dict = field(default_factory=dict)
    mapping: object = "best"
    arms: Optional[list] = None
    methods: Optional[list] = None
    eval_every: Optional[int] = None
    workers: Optional[int] = None
    output_dir: Optional[str] = None

    @classmethod
    def from_dict(cls, data: dict) -> "ExperimentConfig":
        known = {f.name for f in dataclasses.fields(cls)}
        unknown = set(data) - known
        if unknown:
            raise ConfigError(f"unknown config keys: {sorted(unknown)}")
        return cls(**data)

    @classmethod
    def load(cls, path) -> "ExperimentConfig":
        try:
            data = json.loads(Path(path).read_text(encoding="utf-8"))
        except json.JSONDecodeError as exc:
            raise ConfigError(f"{path}: invalid JSON ({exc})") from None
        if not isinstance(data, dict):
            raise ConfigError(f"{path}: top level must be an object")
        return cls.from_dict(data)

    def override(self, **kwargs) -> "ExperimentConfig":
        return dataclasses.replace(self, **{k: v for k, v in kwargs.items() if v is not None})

    # -- resolved views ------------------------------------------------------

    def validate(self) -> None:
        if self.domain not in presets.DOMAINS:
            raise ConfigError(f"unknown domain {self.domain!r}")
        if self.mode not in MODES:
            raise ConfigError(f"unknown mode {self.mode!r}; expected one of {MODES}")
        if self.scale not in SCALES:
            raise ConfigError(f"unknown scale {self.scale!r}")
        for name in ("phase_budget", "pretrain_budget", "trials", "eval_every", "workers"):
            v = getattr(self, name)
            if v is not None and (not isinstance(v, int) or v <= 0):
                raise ConfigError(f"{name} must be a positive integer")
        for arm in self.arms or ():
            if arm not in LIFELONG_ARMS:
                raise ConfigError(f"unknown arm {arm!r}")
        for m in self.methods or ():
            if m not in COMPOSE_METHODS + ("qrm", "qrm-rs"):
                raise ConfigError(f"unknown method {m!r}")
        self.learn_params()
        self.composition_mapping()
        # resolve everything the mode needs so errors surface before training
        if self.mode == "compose-eval":
            self.source_tasks(), self.target_tasks()
        elif self.mode == "repr-eval":
            self.repr_setup()
        elif self.mode == "lifelong":
            self.schedule()
        else:
            self.target_tasks()

    @property
    def domain_info(self) -> dict:
        return presets.DOMAINS[self.domain]

    def n_trials(self) -> int:
        if self.trials is not None:
            return self.trials
        return presets.PAPER_TRIALS if self.scale == "paper" else presets.DESK_TRIALS

    def budget(self, kind: str) -> int:
        explicit = {"phase": self.phase_budget, "target": self.phase_budget,
                    "pretrain": self.pretrain_budget}[kind]
        if explicit is not None:
            return explicit
        base = presets.PAPER_BUDGETS[(self.domain, kind)]
        if self.scale == "paper":
            return base
        return max(1, round(base * presets.DESK_FRACTION[self.mode]))

    def eval_interval(self, budget: int) -> int:
        return self.eval_every if self.eval_every is not None else max(1, budget // 20)

    def learn_params(self, **extra) -> LearnParams:
        values = {"episode_cap": self.domain_info["episode_cap"], "rng_seed": self.seed}
        values.update(self.params)
        values.update(extra)
        try:
            return LearnParams(**values)
        except (TypeError, ValueError) as exc:
            raise ConfigError(f"bad learning parameters: {exc}") from None

    def composition_mapping(self) -> CompositionMapping:
        m = self.mapping
        try:
            if isinstance(m, str):
                return CompositionMapping.preset(m)
            if isinstance(m, dict):
                return CompositionMapping(m.get("and", "average"), m.get("or", "max"),
                                          m.get("then", "left"))
        except ValueError as exc:
            raise ConfigError(str(exc)) from None
        raise ConfigError(f"mapping must be a preset name or an object, not {m!r}")

    def _table(self, value, default: str) -> dict:
        value = default if value is None else value
        if isinstance(value, str):
            try:
                table = presets.TASK_TABLES[value]
            except KeyError:
                raise ConfigError(f"unknown task table {value!r}") from None
        elif isinstance(value, dict):
            table = value
        elif isinstance(value, list):
            table = {}
            for item in value:
                try:
                    table[item["name"]] = item["formula"]
                except (TypeError, KeyError):
                    raise ConfigError("task list entries need 'name' and 'formula'") from None
        else:
            raise ConfigError(f"cannot interpret task specification {value!r}")
        return {name: _parse_task(name, text) for name, text in table.items()}

    def source_tasks(self) -> dict:
        return self._table(self.sources, self.domain_info["sources"])

    def target_tasks(self) -> dict:
        return self._table(self.tasks, self.domain_info["targets"])

    def schedule(self) -> list[list[tuple[str, object]]]:
        phases = self.phases if self.phases is not None else self.domain_info["phases"]
        if isinstance(phases, str):
            try:
                table, phases = presets.PHASE_TABLES[phases]
            except KeyError:
                raise ConfigError(f"unknown phase schedule {phases!r}") from None
            tasks = {name: _parse_task(name, text) for name, text in table.items()}
        else:
            tasks = self._table(self.tasks, self.domain_info["tasks"])
        out = []
        for k, phase in enumerate(phases):
            if not phase:
                raise ConfigError(f"phase {k + 1} is empty")
            try:
                out.append([(name, tasks[name]) for name in phase])
            except KeyError as exc:
                raise ConfigError(f"phase {k + 1} references unknown task {exc}") from None
        return out

    def repr_setup(self) -> tuple[dict, dict]:
        """(sources to pre-train, representations to compare)."""
        spec = self.representations or presets.REPRESENTATION_TABLES[self.domain]
        sources = self._table(self.sources, self.domain_info["sources"])
        try:
            chosen = {name: sources[name] for name in spec["sources"]}
            reps = {name: _parse_task(name, text) for name, text in spec["representations"].items()}
        except KeyError as exc:
            raise ConfigError(f"representation setup references unknown name {exc}") from None
        if not reps:
            raise ConfigError("no representations given")
        return chosen, reps

    def mapping_for_arm(self, arm: str) -> CompositionMapping:
        return PRESETS[{"lsrm-best": "best", "lsrm-worst": "worst"}.get(arm, "none")]

    def to_dict(self) -> dict:
        return dataclasses.asdict(self)


def _parse_task(name: str, text: str):
    try:
        return parse(text)
    except ValueError as exc:
        raise ConfigError(f"task {name!r}: {exc}") from None
