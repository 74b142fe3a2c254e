"""Random formulas and traces for property checks."""

from __future__ import annotations

import random

from .formula import (
    FALSE,
    TRUE,
    And,
    Eventually,
    Formula,
    Next,
    Not,
    Or,
    Prop,
    Then,
    Until,
    normalize,
)

DEFAULT_PROPS = ("p", "q", "r", "s")


def random_formula(rng: random.Random, depth: int = 4, props=DEFAULT_PROPS) -> Formula:
    """Normalized formula over ``props`` with nesting depth at most ``depth``."""
    return normalize(_raw(rng, depth, props))


def _raw(rng: random.Random, depth: int, props) -> Formula:
    if depth <= 0 or rng.random() < 0.2:
        roll = rng.random()
        if roll < 0.06:
            return TRUE
        if roll < 0.1:
            return FALSE
        return Prop(rng.choice(props))
    kind = rng.choice(("not", "and", "or", "next", "until", "ev", "then", "then"))
    sub = lambda: _raw(rng, depth - 1, props)  # noqa: E731
    if kind == "not":
        return Not(sub())
    if kind == "and":
        return And([sub(), sub()])
    if kind == "or":
        return Or([sub(), sub()])
    if kind == "next":
        return Next(sub())
    if kind == "until":
        return Until(sub(), sub())
    if kind == "ev":
        return Eventually(sub())
    return Then(sub(), sub())


def random_eventuality(rng: random.Random, depth: int = 2, props=DEFAULT_PROPS) -> Formula:
    """Formula from the reach-task fragment: ``F p`` combined by and/or/then."""
    if depth <= 0 or rng.random() < 0.35:
        return Eventually(Prop(rng.choice(props)))
    kind = rng.choice(("and", "or", "then"))
    a = random_eventuality(rng, depth - 1, props)
    b = random_eventuality(rng, depth - 1, props)
    if kind == "and":
        return normalize(And([a, b]))
    if kind == "or":
        return normalize(Or([a, b]))
    return normalize(Then(a, b))


def random_label(rng: random.Random, props=DEFAULT_PROPS) -> frozenset:
    return frozenset(p for p in props if rng.random() < 0.3)


def random_trace(rng: random.Random, min_len: int = 1, max_len: int = 8, props=DEFAULT_PROPS) -> tuple:
    n = rng.randint(min_len, max_len)
    return tuple(random_label(rng, props) for _ in range(n))
