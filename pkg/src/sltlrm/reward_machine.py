"""Reward machines whose states are normalized SLTL formulas.

A memory machine starts as the lone success state ``true`` and grows by
:meth:`RewardMachine.extend`, which closes a target formula under
progression by every label and under extraction of the first operand of
``then`` nodes.
"""

from __future__ import annotations

import json
from collections import deque
from dataclasses import dataclass
from typing import Iterable, Sequence

from .sltl import FALSE, TRUE, Formula, Then, canonical_string, parse, progress

DEFAULT_STATE_CAP = 10_000


class RewardMachineError(Exception):
    pass


class StateCapExceeded(RewardMachineError):
    def __init__(self, formula: Formula, cap: int):
        self.formula = formula
        self.cap = cap
        super().__init__(
            f"extending with {canonical_string(formula)!r} exceeds the state cap of {cap}"
        )


def label_key(label: frozenset) -> tuple:
    return (len(label), tuple(sorted(label)))


def make_alphabet(labels: Iterable[Iterable[str]]) -> tuple[frozenset, ...]:
    """Deduplicated, deterministically ordered alphabet."""
    out = {frozenset(l) for l in labels}
    if not out:
        raise ValueError("alphabet must not be empty")
    return tuple(sorted(out, key=label_key))


def format_label(label: frozenset) -> str:
    return "{" + ",".join(sorted(label)) + "}"


class RewardMachine:
    """States, transition table and terminal set of a formula machine.

    ``states`` keeps insertion order so that exports and downstream random
    initialization are reproducible.
    """

    def __init__(self, alphabet: Sequence[frozenset], state_cap: int = DEFAULT_STATE_CAP):
        self.alphabet = make_alphabet(alphabet)
        self._alphabet_set = frozenset(self.alphabet)
        self.state_cap = state_cap
        self._states: dict[Formula, None] = {TRUE: None}
        self.initial: Formula = TRUE
        self.transitions: dict[tuple[Formula, frozenset], Formula] = {}

    @property
    def states(self) -> list[Formula]:
        return list(self._states)

    @property
    def terminals(self) -> set[Formula]:
        return {u for u in (TRUE, FALSE) if u in self._states}

    def __contains__(self, u: Formula) -> bool:
        return u in self._states

    def __len__(self) -> int:
        return len(self._states)

    def is_terminal(self, u: Formula) -> bool:
        return u is TRUE or u is FALSE

    def non_terminal_states(self) -> list[Formula]:
        return [u for u in self._states if not self.is_terminal(u)]

    def _add_state(self, u: Formula, target: Formula) -> None:
        if len(self._states) >= self.state_cap:
            raise StateCapExceeded(target, self.state_cap)
        self._states[u] = None

    def extend(self, target: Formula) -> list[Formula]:
        """Grow the machine to cover ``target``; return the new states in
        discovery order (empty if ``target`` is already a state)."""
        if target in self._states:
            return []
        new = [target]
        self._add_state(target, target)
        queue = deque([target])
        while queue:
            psi = queue.popleft()
            if isinstance(psi, Then) and psi.left not in self._states:
                self._add_state(psi.left, target)
                new.append(psi.left)
                queue.append(psi.left)
            if self.is_terminal(psi):
                continue
            for label in self.alphabet:
                nxt = progress(psi, label)
                if nxt not in self._states:
                    self._add_state(nxt, target)
                    new.append(nxt)
                    queue.append(nxt)
                self.transitions[(psi, label)] = nxt
        return new

    def _check(self, u: Formula, label: frozenset) -> None:
        if u not in self._states:
            raise KeyError(f"unknown state {canonical_string(u)!r}")
        if label not in self._alphabet_set:
            raise KeyError(f"label {format_label(label)} not in alphabet")

    def delta(self, u: Formula, label: frozenset) -> Formula:
        self._check(u, label)
        if self.is_terminal(u):
            return u
        try:
            return self.transitions[(u, label)]
        except KeyError:
            raise RewardMachineError(
                f"no transition from {canonical_string(u)!r} on {format_label(label)}"
            ) from None

    def reward(self, u: Formula, label: frozenset) -> float:
        self._check(u, label)
        if self.is_terminal(u):
            return 0.0
        return 1.0 if self.delta(u, label) is TRUE else 0.0

    # -- serialization ------------------------------------------------------

    def to_dict(self) -> dict:
        transitions = []
        for u in self._states:
            if self.is_terminal(u):
                continue
            for label in self.alphabet:
                v = self.transitions.get((u, label))
                if v is None:
                    continue
                transitions.append(
                    {
                        "from": canonical_string(u),
                        "label": sorted(label),
                        "to": canonical_string(v),
                        "reward": self.reward(u, label),
                    }
                )
        return {
            "alphabet": [sorted(l) for l in self.alphabet],
            "states": [canonical_string(u) for u in self._states],
            "initial": canonical_string(self.initial),
            "terminals": [canonical_string(u) for u in self._states if self.is_terminal(u)],
            "transitions": transitions,
        }

    @classmethod
    def from_dict(cls, data: dict, state_cap: int = DEFAULT_STATE_CAP) -> "RewardMachine":
        rm = cls([frozenset(l) for l in data["alphabet"]], state_cap=state_cap)
        # the JSON alphabet order is already canonical; keep it verbatim
        rm.alphabet = tuple(frozenset(l) for l in data["alphabet"])
        rm._states = {parse(s): None for s in data["states"]}
        rm.initial = parse(data["initial"])
        for tr in data["transitions"]:
            rm.transitions[(parse(tr["from"]), frozenset(tr["label"]))] = parse(tr["to"])
        return rm


def new_memory_rm(alphabet: Sequence[Iterable[str]], state_cap: int = DEFAULT_STATE_CAP) -> RewardMachine:
    """Memory machine holding only the terminal success state."""
    return RewardMachine([frozenset(l) for l in alphabet], state_cap=state_cap)


# -- potential-based shaping ----------------------------------------------------


class PotentialError(RewardMachineError):
    pass


@dataclass
class PotentialTable:
    phi: dict[Formula, float]
    gamma: float
    residual: float = 0.0
    iterations: int = 0

    def __getitem__(self, u: Formula) -> float:
        return self.phi.get(u, 0.0)


def compute_potential(
    rm: RewardMachine, gamma: float, tol: float = 1e-8, max_iter: int = 10_000
) -> PotentialTable:
    """Value iteration Phi(u) = max_l R(u,l) + gamma * Phi(delta(u,l)),
    with Phi fixed at 0 on terminal states."""
    if not 0.0 < gamma <= 1.0:
        raise ValueError("gamma must lie in (0, 1]")
    states = rm.non_terminal_states()
    succ = {
        u: [(rm.reward(u, l), rm.delta(u, l)) for l in rm.alphabet] for u in states
    }
    phi = {u: 0.0 for u in rm.states}
    for it in range(1, max_iter + 1):
        new = {
            u: max(r + gamma * phi[v] for r, v in succ[u]) for u in states
        }
        residual = max((abs(new[u] - phi[u]) for u in states), default=0.0)
        phi.update(new)
        if residual < tol:
            return PotentialTable(phi, gamma, residual, it)
    raise PotentialError(
        f"value iteration did not converge in {max_iter} iterations (residual {residual:g})"
    )


def shaped_reward(rm: RewardMachine, pt: PotentialTable, u: Formula, label: frozenset) -> float:
    return rm.reward(u, label) + pt.gamma * pt[rm.delta(u, label)] - pt[u]


# -- export ---------------------------------------------------------------------


def _dot_quote(s: str) -> str:
    return '"' + s.replace("\\", "\\\\").replace('"', '\\"') + '"'


def to_dot(rm: RewardMachine, initial: Formula | None = None, highlight: Iterable[Formula] = ()) -> str:
    """Graphviz digraph.  Edges between the same pair of states are merged
    into one ``(l1,...,ln | r)`` label."""
    initial = rm.initial if initial is None else initial
    highlight = set(highlight)
    lines = ["digraph reward_machine {", "  rankdir=LR;", "  node [shape=box];"]
    ids = {u: f"s{i}" for i, u in enumerate(rm.states)}
    for u, sid in ids.items():
        attrs = [f"label={_dot_quote(canonical_string(u))}"]
        if rm.is_terminal(u):
            attrs.append("shape=doublecircle")
        if u == initial:
            attrs.append('style=filled fillcolor="yellow"')
        elif u in highlight:
            attrs.append('color="red"')
        lines.append(f"  {sid} [{' '.join(attrs)}];")
    for u in rm.states:
        if rm.is_terminal(u):
            continue
        groups: dict[tuple[Formula, float], list[str]] = {}
        for label in rm.alphabet:
            v = rm.transitions.get((u, label))
            if v is None:
                continue
            groups.setdefault((v, rm.reward(u, label)), []).append(format_label(label))
        for (v, r), labels in groups.items():
            text = f"({','.join(labels)} | {r:g})"
            lines.append(f"  {ids[u]} -> {ids[v]} [label={_dot_quote(text)}];")
    lines.append("}")
    return "\n".join(lines) + "\n"


def to_json(rm: RewardMachine) -> str:
    return json.dumps(rm.to_dict(), indent=2) + "\n"


def from_json(text: str) -> RewardMachine:
    return RewardMachine.from_dict(json.loads(text))


def export(rm: RewardMachine, fmt: str = "dot") -> str:
    if fmt == "dot":
        return to_dot(rm)
    if fmt == "json":
        return to_json(rm)
    raise ValueError(f"unknown export format {fmt!r}")

