"""Tabular Q-functions and the value-composition rules."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from ..sltl import And, Formula, Or, Then

RANDOM_INIT_HIGH = 1e-3
METHODS = ("average", "max", "left", "right", "none")


class QTable:
    """Dense Q-values over (environment state index, action).

    Every pair starts at ``default``; the table is a thin wrapper around a
    float array of shape ``(n_states, n_actions)``.
    """

    __slots__ = ("values", "default")

    def __init__(self, values: np.ndarray, default: float = 0.0):
        values = np.asarray(values, dtype=np.float64)
        if values.ndim != 2:
            raise ValueError("Q-values must be a 2-d array")
        if not np.all(np.isfinite(values)):
            raise ValueError("Q-values must be finite")
        self.values = values
        self.default = default

    @classmethod
    def full(cls, n_states: int, n_actions: int, default: float = 0.0) -> "QTable":
        return cls(np.full((n_states, n_actions), default), default)

    @classmethod
    def random(cls, n_states: int, n_actions: int, rng: np.random.Generator,
               high: float = RANDOM_INIT_HIGH) -> "QTable":
        return cls(rng.uniform(0.0, high, size=(n_states, n_actions)))

    @property
    def shape(self) -> tuple[int, int]:
        return self.values.shape

    def __getitem__(self, sa):
        return self.values[sa]

    def __setitem__(self, sa, value):
        self.values[sa] = value

    def copy(self) -> "QTable":
        return QTable(self.values.copy(), self.default)

    def __eq__(self, other):
        return isinstance(other, QTable) and np.array_equal(self.values, other.values)

    def __repr__(self):
        return f"QTable(shape={self.shape})"


def compose(method: str, q1: QTable, q2: QTable) -> QTable:
    """Combine two Q-tables with one of the composition rules.

    ``max`` picks, state by state, the whole action row of the table with
    the larger best value; ``q2`` wins ties.
    """
    if q1.shape != q2.shape:
        raise ValueError(f"shape mismatch {q1.shape} vs {q2.shape}")
    if method == "average":
        return QTable((q1.values + q2.values) / 2.0)
    if method == "max":
        take_first = q1.values.max(axis=1) > q2.values.max(axis=1)
        return QTable(np.where(take_first[:, None], q1.values, q2.values))
    if method == "left":
        return q1.copy()
    if method == "right":
        return q2.copy()
    raise ValueError(f"unknown composition method {method!r}")


@dataclass(frozen=True)
class CompositionMapping:
    for_and: str = "average"
    for_or: str = "max"
    for_then: str = "left"

    def __post_init__(self):
        for m in (self.for_and, self.for_or, self.for_then):
            if m not in METHODS:
                raise ValueError(f"unknown composition method {m!r}")

    def method_for(self, f: Formula) -> str | None:
        if isinstance(f, And):
            return self.for_and
        if isinstance(f, Or):
            return self.for_or
        if isinstance(f, Then):
            return self.for_then
        return None

    @classmethod
    def uniform(cls, method: str) -> "CompositionMapping":
        return cls(method, method, method)

    @classmethod
    def preset(cls, name: str) -> "CompositionMapping":
        try:
            return PRESETS[name]
        except KeyError:
            raise ValueError(f"unknown mapping preset {name!r}") from None

    def as_dict(self) -> dict:
        return {"and": self.for_and, "or": self.for_or, "then": self.for_then}


PRESETS = {
    "best": CompositionMapping("average", "max", "left"),
    "worst": CompositionMapping("right", "right", "right"),
    "none": CompositionMapping("none", "none", "none"),
}
