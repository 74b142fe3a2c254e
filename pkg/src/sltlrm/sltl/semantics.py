"""Finite-trace satisfaction.

``evaluate`` is the two-valued reference semantics used as a test oracle.
``evaluate_3v`` is a Kleene three-valued variant that returns ``None``
whenever the verdict depends on how the end of the trace is treated: a
strong Next at the last position, or a ``then`` whose first operand could
be satisfied by an empty prefix.  A (formula, trace) pair is *well
defined* when ``evaluate_3v`` gives a definite answer.
"""

from __future__ import annotations

from typing import Optional, Sequence

from .formula import (
    And,
    Bottom,
    Eventually,
    Formula,
    Next,
    Not,
    Or,
    Prop,
    Then,
    Top,
    Until,
)

Trace = tuple  # tuple[frozenset[str], ...]

_MISS = object()


def postfix(trace: Sequence[frozenset], i: int) -> tuple:
    if not 0 <= i <= len(trace):
        raise IndexError(f"postfix index {i} outside 0..{len(trace)}")
    return tuple(trace[i:])


def evaluate(f: Formula, trace: Sequence[frozenset]) -> bool:
    """Finite-trace satisfaction of ``f`` by ``trace`` at position 0."""
    return _Eval(tuple(trace)).at(f, 0, len(trace))


class _Eval:
    # positions index into self.trace; ``end`` bounds the current sub-trace
    def __init__(self, trace: tuple):
        self.trace = trace
        self.memo: dict = {}

    def at(self, f: Formula, i: int, end: int) -> bool:
        key = (f, i, end)
        hit = self.memo.get(key, _MISS)
        if hit is not _MISS:
            return hit
        r = self._at(f, i, end)
        self.memo[key] = r
        return r

    def _at(self, f: Formula, i: int, end: int) -> bool:
        if isinstance(f, Top):
            return True
        if isinstance(f, Bottom):
            return False
        if isinstance(f, Prop):
            return i < end and f.name in self.trace[i]
        if isinstance(f, Not):
            return not self.at(f.arg, i, end)
        if isinstance(f, And):
            return all(self.at(a, i, end) for a in f.args)
        if isinstance(f, Or):
            return any(self.at(a, i, end) for a in f.args)
        if isinstance(f, Next):
            return i + 1 < end and self.at(f.arg, i + 1, end)
        if isinstance(f, Eventually):
            return any(self.at(f.arg, j, end) for j in range(i, end))
        if isinstance(f, Until):
            for j in range(i, end):
                if self.at(f.right, j, end):
                    return True
                if not self.at(f.left, j, end):
                    return False
            return False
        if isinstance(f, Then):
            if isinstance(f.left, Top):
                return self.at(f.right, i, end)
            for j in range(i, end):
                # prefix i..j is evaluated as a trace of its own
                if self.at(f.left, i, j + 1):
                    return self.at(f.right, j + 1, end)
            return False
        raise TypeError(f"not a formula: {f!r}")


# -- three-valued variant ---------------------------------------------------


def _not3(a):
    return None if a is None else not a


def _and3(vals):
    unknown = False
    for v in vals:
        if v is False:
            return False
        if v is None:
            unknown = True
    return None if unknown else True


def _or3(vals):
    unknown = False
    for v in vals:
        if v is True:
            return True
        if v is None:
            unknown = True
    return None if unknown else False


def _same3(a, b):
    if a is None or b is None or a != b:
        return None
    return a


class _Eval3(_Eval):
    def at_empty(self, f: Formula):
        # value on an empty sub-trace; any position with i == end works
        return self.at(f, len(self.trace), len(self.trace))

    def _at(self, f: Formula, i: int, end: int):
        if isinstance(f, (Top, Bottom, Prop)):
            return super()._at(f, i, end)
        if isinstance(f, Not):
            return _not3(self.at(f.arg, i, end))
        if isinstance(f, And):
            return _and3(self.at(a, i, end) for a in f.args)
        if isinstance(f, Or):
            return _or3(self.at(a, i, end) for a in f.args)
        if isinstance(f, Next):
            if i + 1 < end:
                return self.at(f.arg, i + 1, end)
            # strong next fails here; only certain if the operand fails on
            # the empty remainder as well
            return False if self.at_empty(f.arg) is False else None
        if isinstance(f, Eventually):
            return _or3(self.at(f.arg, j, end) for j in range(i, end))
        if isinstance(f, Until):
            terms = []
            guard = True
            for j in range(i, end):
                terms.append(_and3([guard, self.at(f.right, j, end)]))
                guard = _and3([guard, self.at(f.left, j, end)])
                if guard is False:
                    break
            return _or3(terms)
        if isinstance(f, Then):
            if isinstance(f.left, Top):
                return self.at(f.right, i, end)
            terms = []
            none_before = True
            for j in range(i, end):
                hit = self.at(f.left, i, j + 1)
                terms.append(_and3([none_before, hit, self.at(f.right, j + 1, end)]))
                none_before = _and3([none_before, _not3(hit)])
                if none_before is False:
                    break
            strict = _or3(terms)
            empty_ok = self.at_empty(f.left)
            if empty_ok is False:
                return strict
            # an empty first segment would preempt every longer one
            return _same3(strict, self.at(f.right, i, end))
        raise TypeError(f"not a formula: {f!r}")


def evaluate_3v(f: Formula, trace: Sequence[frozenset]) -> Optional[bool]:
    """Three-valued satisfaction; ``None`` marks end-of-trace ambiguity."""
    trace = tuple(trace)
    return _Eval3(trace).at(f, 0, len(trace))


def is_well_defined(f: Formula, trace: Sequence[frozenset]) -> bool:
    return evaluate_3v(f, trace) is not None
