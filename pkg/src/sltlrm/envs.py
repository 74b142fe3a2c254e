"""Deterministic labelled grid worlds loaded from ASCII map files.

Map format (UTF-8, LF)::

    // comment lines start with two slashes
    c=c
    *=star
    S.c#
    ..*.

Header lines bind a glyph to a proposition name.  In the grid ``#`` is a
wall, ``.`` an empty cell, ``S`` the start cell, and every legend glyph a
marked cell.  Row 0 is the top line; ``up`` decreases y.
"""

from __future__ import annotations

import enum
from collections import deque
from dataclasses import dataclass
from importlib import resources
from typing import Optional

import numpy as np

from .reward_machine import make_alphabet
from .sltl.formula import IDENT_RE, RESERVED

Cell = tuple[int, int]


class MapError(ValueError):
    pass


class Action(enum.IntEnum):
    UP = 0
    DOWN = 1
    LEFT = 2
    RIGHT = 3


_DELTA = {
    Action.UP: (0, -1),
    Action.DOWN: (0, 1),
    Action.LEFT: (-1, 0),
    Action.RIGHT: (1, 0),
}
ACTIONS = tuple(Action)


@dataclass(frozen=True)
class GridMap:
    width: int
    height: int
    walls: frozenset
    legend: dict
    marks: dict
    starts: tuple
    name: str = ""

    def in_bounds(self, cell: Cell) -> bool:
        x, y = cell
        return 0 <= x < self.width and 0 <= y < self.height

    def is_free(self, cell: Cell) -> bool:
        return self.in_bounds(cell) and cell not in self.walls

    @property
    def propositions(self) -> frozenset:
        return frozenset(self.marks.values())


def load_map(text: str, name: str = "") -> GridMap:
    legend: dict[str, str] = {}
    lines = text.replace("\r\n", "\n").split("\n")
    i = 0
    while i < len(lines):
        line = lines[i].strip()
        if not line or line.startswith("//"):
            i += 1
            continue
        if "=" in line:
            glyph, _, prop = line.partition("=")
            glyph, prop = glyph.strip(), prop.strip()
            if len(glyph) != 1 or glyph in "#.S":
                raise MapError(f"line {i + 1}: bad legend glyph {glyph!r}")
            if not IDENT_RE.match(prop) or prop in RESERVED:
                raise MapError(f"line {i + 1}: bad proposition name {prop!r}")
            legend[glyph] = prop
            i += 1
            continue
        break
    rows = [l.rstrip() for l in lines[i:]]
    while rows and not rows[-1]:
        rows.pop()
    if not rows:
        raise MapError("map has no grid rows")
    width = len(rows[0])
    walls, marks, starts = set(), {}, []
    for y, row in enumerate(rows):
        if len(row) != width:
            raise MapError(f"ragged grid: row {y} has width {len(row)}, expected {width}")
        for x, ch in enumerate(row):
            if ch == "#":
                walls.add((x, y))
            elif ch == "S":
                starts.append((x, y))
            elif ch == ".":
                pass
            elif ch in legend:
                marks[(x, y)] = legend[ch]
            else:
                raise MapError(f"unknown glyph {ch!r} at column {x}, row {y}")
    if not starts:
        raise MapError("map has no start cell")
    gm = GridMap(width, len(rows), frozenset(walls), legend, marks, tuple(starts), name)
    _check_reachable(gm)
    return gm


def _check_reachable(gm: GridMap) -> None:
    for start in gm.starts:
        seen = bfs_distances(gm, start)
        missing = [c for c in gm.marks if c not in seen]
        if missing:
            raise MapError(f"marked cells {sorted(missing)} unreachable from start {start}")


def step(gm: GridMap, s: Cell, a: Action) -> Cell:
    dx, dy = _DELTA[Action(a)]
    nxt = (s[0] + dx, s[1] + dy)
    return nxt if gm.is_free(nxt) else s


def label(gm: GridMap, s: Cell) -> frozenset:
    p = gm.marks.get(s)
    return frozenset() if p is None else frozenset((p,))


def alphabet(gm: GridMap) -> tuple[frozenset, ...]:
    return make_alphabet([()] + [(p,) for p in gm.marks.values()])


def bfs_distances(gm: GridMap, source: Cell, passable=None) -> dict:
    """Shortest path lengths from ``source`` to every reachable free cell."""
    passable = passable or (lambda c: True)
    dist = {source: 0}
    queue = deque([source])
    while queue:
        c = queue.popleft()
        for a in ACTIONS:
            n = step(gm, c, a)
            if n not in dist and passable(n):
                dist[n] = dist[c] + 1
                queue.append(n)
    return dist


def shipped_map_text(name: str) -> str:
    return resources.files("sltlrm.maps").joinpath(f"{name}.map").read_text(encoding="utf-8")


def load_shipped(name: str) -> GridMap:
    return load_map(shipped_map_text(name), name=name)


class LabeledGridEnv:
    """Index-based view of a map for fast tabular learning.

    Free cells are numbered row-major; ``next_state[s, a]`` and
    ``labels[s]`` are precomputed.  ``slip`` is the probability of
    replacing the chosen action by a uniformly random one (0 = deterministic).
    With ``random_start`` episodes begin in a uniformly drawn free cell
    instead of the map's start.
    """

    def __init__(self, gm: GridMap, slip: float = 0.0, random_start: bool = False):
        self.map = gm
        self.slip = slip
        self.random_start = random_start
        self.cells: list[Cell] = [
            (x, y) for y in range(gm.height) for x in range(gm.width) if (x, y) not in gm.walls
        ]
        self.index = {c: i for i, c in enumerate(self.cells)}
        self.n_states = len(self.cells)
        self.n_actions = len(ACTIONS)
        self.next_state = np.array(
            [[self.index[step(gm, c, a)] for a in ACTIONS] for c in self.cells], dtype=np.int64
        )
        self.labels: list[frozenset] = [label(gm, c) for c in self.cells]
        self.alphabet = alphabet(gm)
        self.start = self.index[gm.starts[0]]

    @classmethod
    def shipped(cls, name: str, slip: float = 0.0) -> "LabeledGridEnv":
        return cls(load_shipped(name), slip=slip)

    def reset(self, rng: Optional[np.random.Generator] = None) -> int:
        if self.random_start and rng is not None:
            return int(rng.integers(self.n_states))
        return self.start

    def step(self, s: int, a: int, rng: Optional[np.random.Generator] = None) -> int:
        if self.slip and rng is not None and rng.random() < self.slip:
            a = int(rng.integers(self.n_actions))
        return int(self.next_state[s, a])

    def label(self, s: int) -> frozenset:
        return self.labels[s]
