"""Sequential LTL: syntax, semantics, progression and decomposition."""

from .formula import (
    FALSE,
    TRUE,
    And,
    Bottom,
    Eventually,
    Formula,
    Label,
    Next,
    Not,
    Or,
    Prop,
    Then,
    Top,
    Until,
    canonical_string,
    conj,
    disj,
    is_normalized,
    neg,
    normalize,
    propositions,
    then,
)
from .parser import FormulaSyntaxError, parse, parse_raw
from .progression import progress, progress_trace
from .representations import (
    decompose,
    rewrite_representations,
    smallest_representation,
    unlearned_count,
)
from .semantics import evaluate, evaluate_3v, is_well_defined, postfix

__all__ = [
    "FALSE",
    "TRUE",
    "And",
    "Bottom",
    "Eventually",
    "Formula",
    "FormulaSyntaxError",
    "Label",
    "Next",
    "Not",
    "Or",
    "Prop",
    "Then",
    "Top",
    "Until",
    "canonical_string",
    "conj",
    "decompose",
    "disj",
    "evaluate",
    "evaluate_3v",
    "is_normalized",
    "is_well_defined",
    "neg",
    "normalize",
    "parse",
    "parse_raw",
    "postfix",
    "progress",
    "progress_trace",
    "propositions",
    "rewrite_representations",
    "smallest_representation",
    "then",
    "unlearned_count",
]
