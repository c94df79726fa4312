from app.core.stl.formula import (
    And,
    Comparator,
    Finally,
    Globally,
    Not,
    Or,
    Predicate,
    StlFormula,
    TrueFormula,
    Until,
    predicate,
)
from app.core.stl.parser import format_formula, parse_formula
from app.core.stl.robustness import (
    Trajectory,
    batch_robustness,
    robustness,
    robustness_signal,
    smooth_error_bound,
    smooth_robustness,
)

__all__ = [
    "And",
    "Comparator",
    "Finally",
    "Globally",
    "Not",
    "Or",
    "Predicate",
    "StlFormula",
    "Trajectory",
    "TrueFormula",
    "Until",
    "batch_robustness",
    "format_formula",
    "parse_formula",
    "predicate",
    "robustness",
    "robustness_signal",
    "smooth_error_bound",
    "smooth_robustness",
]
