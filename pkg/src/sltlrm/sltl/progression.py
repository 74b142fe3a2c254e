"""One-step formula progression."""

from __future__ import annotations

from functools import lru_cache

from .formula import (
    And,
    Bottom,
    Eventually,
    FALSE,
    Formula,
    Next,
    Not,
    Or,
    Prop,
    Then,
    Top,
    TRUE,
    Until,
    conj,
    disj,
    neg,
    then,
)


@lru_cache(maxsize=1 << 16)
def progress(f: Formula, label: frozenset) -> Formula:
    """Formula describing what remains of ``f`` after observing ``label``.

    ``f`` must be normalized; the result is normalized.
    """
    if isinstance(f, (Top, Bottom)):
        return f
    if isinstance(f, Prop):
        return TRUE if f.name in label else FALSE
    if isinstance(f, Not):
        return neg(progress(f.arg, label))
    if isinstance(f, And):
        return conj(*(progress(a, label) for a in f.args))
    if isinstance(f, Or):
        return disj(*(progress(a, label) for a in f.args))
    if isinstance(f, Next):
        return f.arg
    if isinstance(f, Until):
        return disj(progress(f.right, label), conj(progress(f.left, label), f))
    if isinstance(f, Eventually):
        return disj(progress(f.arg, label), f)
    if isinstance(f, Then):
        if f.left is TRUE:
            return progress(f.right, label)
        return then(progress(f.left, label), f.right)
    raise TypeError(f"not a formula: {f!r}")


def progress_trace(f: Formula, labels) -> Formula:
    for label in labels:
        f = progress(f, frozenset(label))
    return f
