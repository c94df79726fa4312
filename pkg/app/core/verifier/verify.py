"""
Sound-but-incomplete region verifier.

A region is verified when every one of its 2^depth-per-dimension sub-boxes passes
an interval check of the task along the propagated reachable sets. Two task shapes
are supported:

- G[t1,t2](conjunction of affine predicates): every predicate margin has a lower
  bound above epsilon (at or above for non-strict comparisons) at every step.
- F[t1,t2](conjunction of affine predicates): some step has all margins above
  epsilon at once. Requiring simultaneity is sufficient, not necessary.

Predicates must use state variables only; derived signals are rejected.
"""

from dataclasses import dataclass

import numpy as np
from loguru import logger

from app.core.controller import MlpParams
from app.core.exceptions import DivergenceError, UnsupportedFormulaError
from app.core.plants.base import BasePlant
from app.core.region import Region
from app.core.stl import And, Finally, Globally, Predicate, StlFormula
from app.core.verifier.interval import IntervalBox
from app.core.verifier.reach import propagate_box


@dataclass(frozen=True)
class CheckTemplate:
    """A supported task shape: quantifier, window and predicate conjunction."""

    always: bool
    t1: int
    t2: int
    predicates: tuple[Predicate, ...]


def _conjuncts(formula: StlFormula) -> list[Predicate]:
    match formula:
        case Predicate():
            return [formula]
        case And(left=left, right=right):
            return _conjuncts(left) + _conjuncts(right)
    raise UnsupportedFormulaError(
        f"Verifier supports conjunctions of predicates under G or F, found {type(formula).__name__}",
        {"formula": str(formula)},
    )


def check_template(formula: StlFormula, state_names: tuple[str, ...]) -> CheckTemplate:
    """
    Match a formula against the supported shapes.

    Raises:
        UnsupportedFormulaError: For any other formula
    """
    match formula:
        case Globally(t1=t1, t2=t2, arg=arg):
            template = CheckTemplate(True, t1, t2, tuple(_conjuncts(arg)))
        case Finally(t1=t1, t2=t2, arg=arg):
            template = CheckTemplate(False, t1, t2, tuple(_conjuncts(arg)))
        case _:
            raise UnsupportedFormulaError(
                f"Verifier supports G[a,b](...) and F[a,b](...) tasks, got {type(formula).__name__}",
                {"formula": str(formula)},
            )
    unknown = sorted(formula.signal_names() - set(state_names))
    if unknown:
        raise UnsupportedFormulaError(
            f"Verifier only handles state variables, formula uses {unknown}",
            {"signals": unknown},
        )
    return template


def margin_lower_bound(pred: Predicate, box: IntervalBox, state_names: tuple[str, ...]) -> np.ndarray:
    """Lower bound of the predicate margin over each box."""
    total = 0.0
    for name, coef in pred.terms:
        lo, hi = box.column(state_names.index(name))
        k = pred.sign * coef
        total = total + np.minimum(k * lo, k * hi)
    bound = total - pred.sign * pred.constant
    return bound - 1e-12 * (1.0 + np.abs(bound))


def _holds(pred: Predicate, box: IntervalBox, state_names: tuple[str, ...], epsilon: float) -> np.ndarray:
    margin = margin_lower_bound(pred, box, state_names)
    return margin > epsilon if pred.op.is_strict else margin >= epsilon


def check_boxes(
    template: CheckTemplate,
    boxes: list[IntervalBox],
    state_names: tuple[str, ...],
    epsilon: float = 0.0,
) -> np.ndarray:
    """Per sub-box verdict of the template over the reachable-set sequence."""
    per_step = [
        np.logical_and.reduce([_holds(p, boxes[t], state_names, epsilon) for p in template.predicates])
        for t in range(template.t1, template.t2 + 1)
    ]
    stacked = np.stack(per_step, axis=0)
    return np.all(stacked, axis=0) if template.always else np.any(stacked, axis=0)


def verify_region(
    plant: BasePlant,
    formula: StlFormula,
    params: MlpParams,
    region: Region,
    refine_depth: int = 2,
    epsilon: float = 0.0,
) -> bool:
    """
    ver(S_i, pi): True only if every initial state in the region satisfies the task.

    False carries no information about the region.

    Raises:
        UnsupportedFormulaError: If the formula is outside the supported shapes
    """
    if refine_depth < 0:
        raise ValueError(f"refine_depth must be non-negative, got {refine_depth}")
    template = check_template(formula, plant.state_names)
    lower, upper = region.split(refine_depth)
    try:
        boxes = propagate_box(plant, params, plant.embed_box(lower, upper), formula.horizon)
    except DivergenceError as e:
        logger.debug(f"Region {region.id}: {e.message}")
        return False
    return bool(np.all(check_boxes(template, boxes, plant.state_names, epsilon)))
