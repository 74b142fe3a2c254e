"""The lifelong memory (machine, learned formulas, Q-tables) and knowledge
acquisition by recursive decomposition."""

from __future__ import annotations

import copy
import json
from dataclasses import dataclass, field

import numpy as np

from ..envs import ACTIONS
from ..reward_machine import RewardMachine, new_memory_rm
from ..sltl import And, Formula, Then, canonical_string, conj, disj, parse
from .qtable import CompositionMapping, QTable, compose


@dataclass
class Memory:
    rm: RewardMachine
    n_states: int
    n_actions: int
    learned: set = field(default_factory=set)
    qtables: dict = field(default_factory=dict)
    # how each state's table was first obtained, e.g. "left([F c], random)"
    provenance: dict = field(default_factory=dict)

    @classmethod
    def empty(cls, alphabet, n_states: int, n_actions: int, state_cap: int | None = None) -> "Memory":
        kwargs = {} if state_cap is None else {"state_cap": state_cap}
        return cls(new_memory_rm(alphabet, **kwargs), n_states, n_actions)

    def copy(self) -> "Memory":
        return copy.deepcopy(self)

    def check_invariants(self) -> None:
        states = set(self.rm.states)
        assert set(self.qtables) <= states, "Q-table for a state outside the machine"
        assert self.learned <= states, "learned formula outside the machine"
        assert not any(self.rm.is_terminal(u) for u in self.qtables), "terminal state has a Q-table"

    # -- snapshots ------------------------------------------------------------

    def to_dict(self) -> dict:
        tables = {}
        for u, q in self.qtables.items():
            s_idx, a_idx = np.nonzero(q.values)
            tables[canonical_string(u)] = [
                [int(s), ACTIONS[a].name.lower(), float(q.values[s, a])]
                for s, a in zip(s_idx, a_idx)
            ]
        return {
            "rm": self.rm.to_dict(),
            "n_states": self.n_states,
            "n_actions": self.n_actions,
            "learned": sorted(canonical_string(u) for u in self.learned),
            "qtables": tables,
            "provenance": {canonical_string(u): src for u, src in self.provenance.items()},
        }

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), indent=1) + "\n"

    @classmethod
    def from_dict(cls, data: dict) -> "Memory":
        rm = RewardMachine.from_dict(data["rm"])
        mem = cls(rm, data["n_states"], data["n_actions"])
        mem.learned = {parse(s) for s in data["learned"]}
        action_index = {a.name.lower(): int(a) for a in ACTIONS}
        for key, triples in data["qtables"].items():
            q = QTable.full(mem.n_states, mem.n_actions)
            for s, a, v in triples:
                q.values[s, action_index[a]] = v
            mem.qtables[parse(key)] = q
        mem.provenance = {parse(k): v for k, v in data.get("provenance", {}).items()}
        return mem


def _binary_split(f: Formula) -> tuple[Formula, Formula]:
    # n-ary and/or is re-binarized left-associatively
    if isinstance(f, Then):
        return f.left, f.right
    rebuild = conj if isinstance(f, And) else disj
    return rebuild(*f.args[:-1]), f.args[-1]


def acquire_with_source(memory: Memory, target: Formula, mapping: CompositionMapping,
                        rng: np.random.Generator) -> tuple[QTable, str]:
    """Q-table for ``target`` plus a readable description of its origin."""
    if target in memory.learned:
        q = memory.qtables.get(target)
        if q is None:  # a terminal formula: nothing left to do, value 0
            return QTable.full(memory.n_states, memory.n_actions), f"[{target}]"
        return q.copy(), f"[{target}]"
    if memory.rm.is_terminal(target):
        return QTable.full(memory.n_states, memory.n_actions), f"[{target}]"
    method = mapping.method_for(target)
    if method is not None and method != "none":
        left, right = _binary_split(target)
        q1, s1 = acquire_with_source(memory, left, mapping, rng)
        q2, s2 = acquire_with_source(memory, right, mapping, rng)
        return compose(method, q1, q2), f"{method}({s1}, {s2})"
    return QTable.random(memory.n_states, memory.n_actions, rng), "random"


def acquire_knowledge(memory: Memory, target: Formula, mapping: CompositionMapping,
                      rng: np.random.Generator) -> QTable:
    """Initial Q-table for ``target`` built from what the memory has learned.

    Learned formulas return a copy of their table; and/or/then formulas
    combine the recursively acquired tables of their two operands with the
    mapping's rule for that operator; anything else gets a fresh
    near-zero random table.  Stored tables are never modified.
    """
    return acquire_with_source(memory, target, mapping, rng)[0]

