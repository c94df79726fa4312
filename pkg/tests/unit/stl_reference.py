"""
Brute-force pointwise STL evaluators used as oracles in the robustness tests.
"""

import numpy as np

from app.config import settings
from app.core.stl import And, Comparator, Finally, Globally, Not, Or, Predicate, StlFormula, TrueFormula, Until


def _margin(pred: Predicate, states: np.ndarray, names: tuple[str, ...], t: int) -> float:
    total = 0.0
    for name, coef in pred.terms:
        total = total + coef * float(states[t, names.index(name)])
    return pred.sign * (total - pred.constant)


def reference_robustness(formula: StlFormula, states: np.ndarray, names: tuple[str, ...], t: int = 0) -> float:
    match formula:
        case TrueFormula():
            return settings.TOP_ROBUSTNESS
        case Predicate():
            return _margin(formula, states, names, t)
        case Not(arg=arg):
            return -reference_robustness(arg, states, names, t)
        case And(left=left, right=right):
            return min(reference_robustness(left, states, names, t), reference_robustness(right, states, names, t))
        case Or(left=left, right=right):
            return max(reference_robustness(left, states, names, t), reference_robustness(right, states, names, t))
        case Globally(t1=t1, t2=t2, arg=arg):
            return min(reference_robustness(arg, states, names, k) for k in range(t + t1, t + t2 + 1))
        case Finally(t1=t1, t2=t2, arg=arg):
            return max(reference_robustness(arg, states, names, k) for k in range(t + t1, t + t2 + 1))
        case Until(t1=t1, t2=t2, left=left, right=right):
            best = -np.inf
            for k in range(t + t1, t + t2 + 1):
                value = reference_robustness(right, states, names, k)
                for j in range(t, k):
                    value = min(value, reference_robustness(left, states, names, j))
                best = max(best, value)
            return best
    raise TypeError(type(formula).__name__)


def reference_holds(formula: StlFormula, states: np.ndarray, names: tuple[str, ...], t: int = 0) -> bool:
    match formula:
        case TrueFormula():
            return True
        case Predicate():
            margin = _margin(formula, states, names, t)
            return margin > 0 if formula.op.is_strict else margin >= 0
        case Not(arg=arg):
            return not reference_holds(arg, states, names, t)
        case And(left=left, right=right):
            return reference_holds(left, states, names, t) and reference_holds(right, states, names, t)
        case Or(left=left, right=right):
            return reference_holds(left, states, names, t) or reference_holds(right, states, names, t)
        case Globally(t1=t1, t2=t2, arg=arg):
            return all(reference_holds(arg, states, names, k) for k in range(t + t1, t + t2 + 1))
        case Finally(t1=t1, t2=t2, arg=arg):
            return any(reference_holds(arg, states, names, k) for k in range(t + t1, t + t2 + 1))
        case Until(t1=t1, t2=t2, left=left, right=right):
            return any(
                reference_holds(right, states, names, k) and all(reference_holds(left, states, names, j) for j in range(t, k))
                for k in range(t + t1, t + t2 + 1)
            )
    raise TypeError(type(formula).__name__)


def random_formula(rng: np.random.Generator, names: tuple[str, ...], depth: int = 4) -> StlFormula:
    """Random formula of at most the given depth with windows no wider than [0, 3]."""
    if depth <= 1 or rng.random() < 0.25:
        name = names[int(rng.integers(len(names)))]
        op = [">", ">=", "<", "<="][int(rng.integers(4))]
        terms = ((name, float(rng.choice([1.0, -1.0, 2.0]))),)
        if rng.random() < 0.3:
            other = names[int(rng.integers(len(names)))]
            terms = (*terms, (other, 0.5))
        return Predicate(terms, Comparator(op), float(rng.normal()))
    kind = int(rng.integers(6))
    t1 = int(rng.integers(0, 3))
    t2 = t1 + int(rng.integers(0, 2))
    if kind == 0:
        return Not(random_formula(rng, names, depth - 1))
    if kind == 1:
        return And(random_formula(rng, names, depth - 1), random_formula(rng, names, depth - 1))
    if kind == 2:
        return Or(random_formula(rng, names, depth - 1), random_formula(rng, names, depth - 1))
    if kind == 3:
        return Globally(t1, t2, random_formula(rng, names, depth - 1))
    if kind == 4:
        return Finally(t1, t2, random_formula(rng, names, depth - 1))
    return Until(t1, t2, random_formula(rng, names, depth - 1), random_formula(rng, names, depth - 1))
