"""Formula AST, canonical printing and the normalizing rewrite system.

Every node is immutable.  Equality and hashing go through the canonical
string, which the printer guarantees to be injective on ASTs, so two
formulas compare equal exactly when they are the same tree.
"""

from __future__ import annotations

import re
from typing import Iterable, Iterator

IDENT_RE = re.compile(r"[A-Za-z_][A-Za-z0-9_]*\Z")
RESERVED = frozenset({"true", "false", "U", "X", "F"})

# binding strength used by the printer; larger binds tighter
PREC_THEN, PREC_OR, PREC_AND, PREC_UNTIL, PREC_UNARY, PREC_ATOM = range(1, 7)

Label = frozenset  # frozenset[str] of proposition names true at one step


class Formula:
    __slots__ = ("_text", "_hash")

    prec = PREC_ATOM

    def _init_text(self, text: str) -> None:
        object.__setattr__(self, "_text", text)
        object.__setattr__(self, "_hash", hash((type(self).__name__, text)))

    def __setattr__(self, name, value):
        raise AttributeError(f"{type(self).__name__} is immutable")

    def __eq__(self, other: object) -> bool:
        if self is other:
            return True
        return (
            isinstance(other, Formula)
            and type(self) is type(other)
            and self._text == other._text
        )

    def __hash__(self) -> int:
        return self._hash

    def __lt__(self, other: "Formula") -> bool:
        return self._text < other._text

    def __str__(self) -> str:
        return self._text

    def __repr__(self) -> str:
        return f"<{type(self).__name__} {self._text}>"

    def __reduce__(self):
        return (type(self), self._args())

    def _args(self) -> tuple:
        return ()

    @property
    def children(self) -> tuple["Formula", ...]:
        return ()

    def walk(self) -> Iterator["Formula"]:
        """Pre-order traversal of every node."""
        stack = [self]
        while stack:
            node = stack.pop()
            yield node
            stack.extend(reversed(node.children))

    def size(self) -> int:
        return sum(1 for _ in self.walk())


def _wrap(child: Formula, min_prec: int) -> str:
    if child.prec < min_prec:
        return f"({child._text})"
    return child._text


class Top(Formula):
    __slots__ = ()
    _instance = None

    def __new__(cls):
        if cls._instance is None:
            inst = object.__new__(cls)
            inst._init_text("true")
            cls._instance = inst
        return cls._instance


class Bottom(Formula):
    __slots__ = ()
    _instance = None

    def __new__(cls):
        if cls._instance is None:
            inst = object.__new__(cls)
            inst._init_text("false")
            cls._instance = inst
        return cls._instance


TRUE = Top()
FALSE = Bottom()


class Prop(Formula):
    """Atomic proposition.  Instances are interned by name."""

    __slots__ = ("name",)
    _interned: dict[str, "Prop"] = {}

    def __new__(cls, name: str):
        inst = cls._interned.get(name)
        if inst is not None:
            return inst
        if not isinstance(name, str) or not IDENT_RE.match(name):
            raise ValueError(f"invalid proposition name {name!r}")
        if name in RESERVED:
            raise ValueError(f"proposition name {name!r} is a reserved word")
        inst = object.__new__(cls)
        object.__setattr__(inst, "name", name)
        inst._init_text(name)
        cls._interned[name] = inst
        return inst

    def _args(self):
        return (self.name,)


class _Unary(Formula):
    __slots__ = ("arg",)
    prec = PREC_UNARY
    symbol = ""

    def __init__(self, arg: Formula):
        object.__setattr__(self, "arg", arg)
        self._init_text(self.symbol + _wrap(arg, PREC_UNARY))

    def _args(self):
        return (self.arg,)

    @property
    def children(self):
        return (self.arg,)


class Not(_Unary):
    __slots__ = ()
    symbol = "!"


class Next(_Unary):
    __slots__ = ()
    symbol = "X "


class Eventually(_Unary):
    __slots__ = ()
    symbol = "F "


class _NAry(Formula):
    __slots__ = ("args",)
    joiner = ""

    def __init__(self, args: Iterable[Formula]):
        args = tuple(args)
        if len(args) < 2:
            raise ValueError(f"{type(self).__name__} needs at least two operands")
        object.__setattr__(self, "args", args)
        self._init_text(self.joiner.join(_wrap(a, self.prec + 1) for a in args))

    def _args(self):
        return (self.args,)

    @property
    def children(self):
        return self.args


class And(_NAry):
    __slots__ = ()
    prec = PREC_AND
    joiner = " & "


class Or(_NAry):
    __slots__ = ()
    prec = PREC_OR
    joiner = " | "


class Until(Formula):
    __slots__ = ("left", "right")
    prec = PREC_UNTIL

    def __init__(self, left: Formula, right: Formula):
        object.__setattr__(self, "left", left)
        object.__setattr__(self, "right", right)
        # right-associative
        self._init_text(
            f"{_wrap(left, PREC_UNTIL + 1)} U {_wrap(right, PREC_UNTIL)}"
        )

    def _args(self):
        return (self.left, self.right)

    @property
    def children(self):
        return (self.left, self.right)


class Then(Formula):
    """Sequential composition: complete ``left`` (earliest prefix), then ``right``."""

    __slots__ = ("left", "right")
    prec = PREC_THEN

    def __init__(self, left: Formula, right: Formula):
        object.__setattr__(self, "left", left)
        object.__setattr__(self, "right", right)
        # left-associative
        self._init_text(f"{_wrap(left, PREC_THEN)} ; {_wrap(right, PREC_THEN + 1)}")

    def _args(self):
        return (self.left, self.right)

    @property
    def children(self):
        return (self.left, self.right)


def canonical_string(f: Formula) -> str:
    return f._text


# -- smart constructors: build normalized nodes from normalized operands --


def neg(f: Formula) -> Formula:
    if f is TRUE:
        return FALSE
    if f is FALSE:
        return TRUE
    if isinstance(f, Not):
        return f.arg
    return Not(f)


def _flatten(cls, operands: Iterable[Formula]) -> list[Formula]:
    out: list[Formula] = []
    for f in operands:
        if isinstance(f, cls):
            out.extend(f.args)
        else:
            out.append(f)
    return out


def conj(*operands: Formula) -> Formula:
    ops = set()
    for f in _flatten(And, operands):
        if f is FALSE:
            return FALSE
        if f is not TRUE:
            ops.add(f)
    if not ops:
        return TRUE
    if len(ops) == 1:
        return ops.pop()
    return And(sorted(ops))


def disj(*operands: Formula) -> Formula:
    ops = set()
    for f in _flatten(Or, operands):
        if f is TRUE:
            return TRUE
        if f is not FALSE:
            ops.add(f)
    if not ops:
        return FALSE
    if len(ops) == 1:
        return ops.pop()
    return Or(sorted(ops))


def then(left: Formula, right: Formula) -> Formula:
    if left is TRUE:
        return right
    if left is FALSE:
        return FALSE
    return Then(left, right)


def normalize(f: Formula) -> Formula:
    """Rewrite ``f`` bottom-up into the canonical normal form."""
    if isinstance(f, (Top, Bottom, Prop)):
        return f
    if isinstance(f, Not):
        return neg(normalize(f.arg))
    if isinstance(f, And):
        return conj(*(normalize(a) for a in f.args))
    if isinstance(f, Or):
        return disj(*(normalize(a) for a in f.args))
    if isinstance(f, Next):
        return Next(normalize(f.arg))
    if isinstance(f, Eventually):
        return Eventually(normalize(f.arg))
    if isinstance(f, Until):
        return Until(normalize(f.left), normalize(f.right))
    if isinstance(f, Then):
        return then(normalize(f.left), normalize(f.right))
    raise TypeError(f"not a formula: {f!r}")


def is_normalized(f: Formula) -> bool:
    for node in f.walk():
        if isinstance(node, (And, Or)):
            if any(a is TRUE or a is FALSE or type(a) is type(node) for a in node.args):
                return False
            if list(node.args) != sorted(set(node.args)):
                return False
        elif isinstance(node, Not):
            if node.arg is TRUE or node.arg is FALSE or isinstance(node.arg, Not):
                return False
        elif isinstance(node, Then):
            if node.left is TRUE or node.left is FALSE:
                return False
    return True


def propositions(f: Formula) -> frozenset[str]:
    return frozenset(n.name for n in f.walk() if isinstance(n, Prop))
