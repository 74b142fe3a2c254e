"""Task decomposition, operator-law rewriting and representation choice."""

from __future__ import annotations

from typing import Callable, Iterable, Iterator, Sequence

from .formula import (
    And,
    Bottom,
    Formula,
    Not,
    Or,
    Then,
    Top,
    Until,
    conj,
    disj,
    neg,
    then,
)

DEFAULT_REWRITE_DEPTH = 3


def decompose(f: Formula) -> set[Formula]:
    """All sub-formulas reachable by splitting at and/or/then nodes."""
    out: set[Formula] = set()
    stack = [f]
    while stack:
        node = stack.pop()
        if isinstance(node, (Top, Bottom)) or node in out:
            continue
        out.add(node)
        if isinstance(node, (And, Or, Then)):
            stack.extend(node.children)
    return out


# -- operator laws ------------------------------------------------------------
#
#   assoc  (a;b);c        <-> a;(b;c)
#   (i)    (a;b)&(a;c)    <-> a;(b&c)
#   (ii)   (a;c)&(b;c)    <-> (a&b);c
#   (iii)  (a;b)|(a;c)    <-> a;(b|c)
#   (iv)   (a;c)|(b;c)    <-> (a|b);c


def _factor(node: Formula, combine: Callable, shared_left: bool) -> Iterator[Formula]:
    # pairwise factoring inside an n-ary and/or node
    args = node.args
    rebuild = conj if isinstance(node, And) else disj
    for i in range(len(args)):
        for j in range(i + 1, len(args)):
            x, y = args[i], args[j]
            if not (isinstance(x, Then) and isinstance(y, Then)):
                continue
            rest = args[:i] + args[i + 1 : j] + args[j + 1 :]
            if shared_left and x.left == y.left:
                yield rebuild(then(x.left, combine(x.right, y.right)), *rest)
            if not shared_left and x.right == y.right:
                yield rebuild(then(combine(x.left, y.left), x.right), *rest)


def _distribute(node: Then) -> Iterator[Formula]:
    if isinstance(node.right, And):
        yield conj(*(then(node.left, r) for r in node.right.args))
    if isinstance(node.right, Or):
        yield disj(*(then(node.left, r) for r in node.right.args))
    if isinstance(node.left, And):
        yield conj(*(then(l, node.right) for l in node.left.args))
    if isinstance(node.left, Or):
        yield disj(*(then(l, node.right) for l in node.left.args))


def _root_rewrites(f: Formula) -> Iterator[Formula]:
    if isinstance(f, Then):
        if isinstance(f.left, Then):
            yield then(f.left.left, then(f.left.right, f.right))
        if isinstance(f.right, Then):
            yield then(then(f.left, f.right.left), f.right.right)
        yield from _distribute(f)
    elif isinstance(f, And):
        yield from _factor(f, conj, shared_left=True)
        yield from _factor(f, conj, shared_left=False)
    elif isinstance(f, Or):
        yield from _factor(f, disj, shared_left=True)
        yield from _factor(f, disj, shared_left=False)


def _rebuild(f: Formula, idx: int, child: Formula) -> Formula:
    kids = list(f.children)
    kids[idx] = child
    if isinstance(f, Not):
        return neg(child)
    if isinstance(f, And):
        return conj(*kids)
    if isinstance(f, Or):
        return disj(*kids)
    if isinstance(f, Then):
        return then(*kids)
    if isinstance(f, Until):
        return Until(*kids)
    return type(f)(child)  # Next / Eventually


def one_step_rewrites(f: Formula) -> set[Formula]:
    """Formulas obtained by one law application at any subterm."""
    out = set(_root_rewrites(f))
    for idx, child in enumerate(f.children):
        for r in one_step_rewrites(child):
            out.add(_rebuild(f, idx, r))
    out.discard(f)
    return out


def rewrite_representations(f: Formula, depth: int = DEFAULT_REWRITE_DEPTH) -> set[Formula]:
    """Bounded breadth-first closure of ``f`` under the operator laws."""
    if depth < 1:
        raise ValueError("depth must be a positive integer")
    seen = {f}
    frontier = [f]
    for _ in range(depth):
        nxt = []
        for g in frontier:
            for h in one_step_rewrites(g):
                if h not in seen:
                    seen.add(h)
                    nxt.append(h)
        if not nxt:
            break
        frontier = nxt
    return seen


def unlearned_count(f: Formula, learned: Iterable[Formula]) -> int:
    return len(decompose(f) - set(learned))


def smallest_representation(candidates: Sequence[Formula], learned: Iterable[Formula]) -> Formula:
    """Candidate with the fewest not-yet-learned sub-formulas.

    Ties go to the smaller decomposition, then to the lexicographically
    smaller canonical string.
    """
    if not candidates:
        raise ValueError("no candidate representations given")
    learned = set(learned)

    def key(c: Formula):
        parts = decompose(c)
        return (len(parts - learned), len(parts), str(c))

    return min(candidates, key=key)


__all__ = [
    "DEFAULT_REWRITE_DEPTH",
    "decompose",
    "one_step_rewrites",
    "rewrite_representations",
    "smallest_representation",
    "unlearned_count",
]
