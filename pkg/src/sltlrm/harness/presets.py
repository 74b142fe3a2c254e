"""Built-in task tables, schedules and budgets for the two domains."""

from __future__ import annotations


def _avoid(p: str) -> str:
    return f"(!star U {p})"


def _seq(*parts: str) -> str:
    return " ; ".join(f"({p})" for p in parts)


def _ev(p: str) -> str:
    return f"F {p}"


OFFICE_SOURCES = {
    "phi1": _seq(_avoid("c"), _avoid("o")),
    "phi2": _seq(_avoid("m"), _avoid("o")),
    "phi3": _seq(_avoid("B"), _avoid("o")),
    "phi4": _seq(_avoid("B"), _avoid("C")),
    "phi5": _seq(_avoid("o"), _avoid("B")),
    "phi6": _seq(_avoid("m"), _avoid("D")),
    "phi7": _seq(_avoid("m"), _avoid("A")),
}

CRAFT_SOURCES = {
    "psi1": _seq(_ev("a"), _ev("b")),
    "psi2": _seq(_ev("a"), _ev("c")),
    "psi3": _seq(_ev("d"), _ev("e")),
    "psi4": _seq(_ev("d"), _ev("b")),
    "psi5": _seq("F a & F f", _ev("e")),
    "psi6": _seq("F a & F f", _ev("c")),
}


def _combine(sources: dict, prefix: str, op: str, i: int, j: int) -> tuple[str, str]:
    word = {"&": "and", "|": "or", ";": "then"}[op]
    return f"{word}_{i}_{j}", f"({sources[prefix + str(i)]}) {op} ({sources[prefix + str(j)]})"


OFFICE_TARGETS = dict(
    _combine(OFFICE_SOURCES, "phi", op, i, j)
    for op, i, j in [("&", 1, 2), ("&", 4, 6), ("|", 4, 5), ("|", 4, 7),
                     (";", 4, 5), (";", 4, 6), (";", 5, 6)]
)

CRAFT_TARGETS = dict(
    _combine(CRAFT_SOURCES, "psi", op, i, j)
    for op, i, j in [("&", 1, 3), ("&", 4, 5), ("&", 4, 6), ("|", 1, 3),
                     ("|", 2, 3), (";", 2, 3), (";", 5, 6)]
)

OFFICE_TASKS = {
    "coffee_to_A": _seq(_avoid("c"), _avoid("A")),
    "mail_to_B": _seq(_avoid("m"), _avoid("B")),
    "coffee_to_office": OFFICE_SOURCES["phi1"],
    "mail_to_office": OFFICE_SOURCES["phi2"],
    "coffee_and_mail_to_office": f"({OFFICE_SOURCES['phi1']}) & ({OFFICE_SOURCES['phi2']})",
    "B_then_A": _seq(_avoid("B"), _avoid("A")),
}
OFFICE_PHASES = [
    ["coffee_to_A", "mail_to_B"],
    ["coffee_to_office", "mail_to_office"],
    ["coffee_and_mail_to_office", "B_then_A"],
]

CRAFT_TASKS = {
    "plank": CRAFT_SOURCES["psi1"],
    "stick": CRAFT_SOURCES["psi2"],
    "cloth": CRAFT_SOURCES["psi3"],
    "rope": CRAFT_SOURCES["psi4"],
    "bridge": CRAFT_SOURCES["psi5"],
    "bed": "((F a ; F b) & F d) ; F c",
    "axe": "((F a ; F c) & F f) ; F b",
    "shears": CRAFT_SOURCES["psi6"],
    "gold": "(F a & F f) ; F e ; F g",
    "gem": "((F a ; F c) & F f) ; F b ; F h",
}
CRAFT_PHASES = [
    ["plank", "stick"],
    ["cloth", "rope"],
    ["bridge", "bed"],
    ["axe", "shears"],
    ["gold", "gem"],
]

# alternative representations of one task; the first entry is the smallest
OFFICE_REPRESENTATIONS = {
    "sources": ["phi1", "phi2"],
    "representations": {
        "smallest": f"({OFFICE_SOURCES['phi1']}) & ({OFFICE_SOURCES['phi2']})",
        "alt1": f"({_avoid('c')} & {_avoid('m')}) ; {_avoid('o')}",
    },
}
CRAFT_REPRESENTATIONS = {
    "sources": ["psi1", "psi2", "psi3", "psi4"],
    "representations": {
        "smallest": "((F a ; F b) & F d) ; F c",
        "alt1": "((F a ; F b) ; F c) & (F d ; F c)",
        "alt2": "(F a ; (F b ; F c)) & (F d ; F c)",
    },
}

TASK_TABLES = {
    "office-sources": OFFICE_SOURCES,
    "office-targets": OFFICE_TARGETS,
    "office-tasks": OFFICE_TASKS,
    "craft-sources": CRAFT_SOURCES,
    "craft-targets": CRAFT_TARGETS,
    "craft-tasks": CRAFT_TASKS,
}
PHASE_TABLES = {
    "office-phases": (OFFICE_TASKS, OFFICE_PHASES),
    "craft-phases": (CRAFT_TASKS, CRAFT_PHASES),
}
REPRESENTATION_TABLES = {
    "office": OFFICE_REPRESENTATIONS,
    "minecraft": CRAFT_REPRESENTATIONS,
}

DOMAINS = {
    "office": {"map": "officeworld", "episode_cap": 1000,
               "sources": "office-sources", "targets": "office-targets",
               "tasks": "office-tasks", "phases": "office-phases"},
    "minecraft": {"map": "minecraft", "episode_cap": 600,
                  "sources": "craft-sources", "targets": "craft-targets",
                  "tasks": "craft-tasks", "phases": "craft-phases"},
}

# full-scale budgets in environment steps
PAPER_BUDGETS = {
    ("office", "pretrain"): 50_000,
    ("minecraft", "pretrain"): 300_000,
    ("office", "target"): 50_000,
    ("minecraft", "target"): 400_000,
    ("office", "phase"): 30_000,
    ("minecraft", "phase"): 400_000,
}
PAPER_TRIALS = 20
DESK_TRIALS = 5
# desk runs shrink budgets: one fifth for compose/representation runs,
# one third for lifelong phases
DESK_FRACTION = {"compose-eval": 0.2, "repr-eval": 0.2, "single": 0.2, "lifelong": 1 / 3}
