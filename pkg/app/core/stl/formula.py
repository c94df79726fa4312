"""
Abstract syntax tree for discrete-time Signal Temporal Logic.

Temporal bounds are closed step-index intervals [t1, t2]. Predicates are affine
combinations of named signals (state variables or registered derived signals)
compared against a constant.
"""

from __future__ import annotations

import math
from abc import ABC, abstractmethod
from dataclasses import dataclass
from enum import StrEnum

from app.core.exceptions import FormulaError


class Comparator(StrEnum):
    GT = ">"
    GE = ">="
    LT = "<"
    LE = "<="

    @property
    def is_strict(self) -> bool:
        return self in (Comparator.GT, Comparator.LT)

    @property
    def is_lower_bound(self) -> bool:
        """True when the predicate asks the expression to stay above the constant."""
        return self in (Comparator.GT, Comparator.GE)


class StlFormula(ABC):
    """Base class of every formula node."""

    @property
    @abstractmethod
    def horizon(self) -> int:
        """Number of future steps the formula needs beyond the evaluation index."""

    @abstractmethod
    def children(self) -> tuple[StlFormula, ...]:
        """Direct sub-formulas."""

    def signal_names(self) -> set[str]:
        """All signal names referenced by predicates in this formula."""
        names: set[str] = set()
        for node in walk(self):
            if isinstance(node, Predicate):
                names.update(name for name, _ in node.terms)
        return names

    def __str__(self) -> str:
        from app.core.stl.parser import format_formula

        return format_formula(self)


@dataclass(frozen=True)
class TrueFormula(StlFormula):
    @property
    def horizon(self) -> int:
        return 0

    def children(self) -> tuple[StlFormula, ...]:
        return ()


@dataclass(frozen=True)
class Predicate(StlFormula):
    """`sum(coef * signal) <op> constant`; the margin is positive when satisfied."""

    terms: tuple[tuple[str, float], ...]
    op: Comparator
    constant: float

    def __post_init__(self) -> None:
        if not self.terms:
            raise FormulaError("Predicate needs at least one term")
        for name, coef in self.terms:
            if not name:
                raise FormulaError("Predicate term has an empty signal name")
            if not math.isfinite(coef):
                raise FormulaError(f"Predicate coefficient for '{name}' is not finite", {"coefficient": coef})
        if not math.isfinite(self.constant):
            raise FormulaError("Predicate constant is not finite", {"constant": self.constant})

    @property
    def horizon(self) -> int:
        return 0

    def children(self) -> tuple[StlFormula, ...]:
        return ()

    @property
    def sign(self) -> float:
        """+1 for lower-bound predicates (`>`, `>=`), -1 for upper-bound ones."""
        return 1.0 if self.op.is_lower_bound else -1.0


@dataclass(frozen=True)
class Not(StlFormula):
    arg: StlFormula

    @property
    def horizon(self) -> int:
        return self.arg.horizon

    def children(self) -> tuple[StlFormula, ...]:
        return (self.arg,)


@dataclass(frozen=True)
class And(StlFormula):
    left: StlFormula
    right: StlFormula

    @property
    def horizon(self) -> int:
        return max(self.left.horizon, self.right.horizon)

    def children(self) -> tuple[StlFormula, ...]:
        return (self.left, self.right)


@dataclass(frozen=True)
class Or(StlFormula):
    left: StlFormula
    right: StlFormula

    @property
    def horizon(self) -> int:
        return max(self.left.horizon, self.right.horizon)

    def children(self) -> tuple[StlFormula, ...]:
        return (self.left, self.right)


def _check_window(t1: int, t2: int) -> None:
    if isinstance(t1, bool) or isinstance(t2, bool) or not isinstance(t1, int) or not isinstance(t2, int):
        raise FormulaError("Temporal bounds must be integer step indices", {"t1": t1, "t2": t2})
    if not 0 <= t1 <= t2:
        raise FormulaError(f"Temporal bounds must satisfy 0 <= t1 <= t2, got [{t1},{t2}]", {"t1": t1, "t2": t2})


@dataclass(frozen=True)
class Globally(StlFormula):
    t1: int
    t2: int
    arg: StlFormula

    def __post_init__(self) -> None:
        _check_window(self.t1, self.t2)

    @property
    def horizon(self) -> int:
        return self.t2 + self.arg.horizon

    def children(self) -> tuple[StlFormula, ...]:
        return (self.arg,)


@dataclass(frozen=True)
class Finally(StlFormula):
    t1: int
    t2: int
    arg: StlFormula

    def __post_init__(self) -> None:
        _check_window(self.t1, self.t2)

    @property
    def horizon(self) -> int:
        return self.t2 + self.arg.horizon

    def children(self) -> tuple[StlFormula, ...]:
        return (self.arg,)


@dataclass(frozen=True)
class Until(StlFormula):
    t1: int
    t2: int
    left: StlFormula
    right: StlFormula

    def __post_init__(self) -> None:
        _check_window(self.t1, self.t2)

    @property
    def horizon(self) -> int:
        return self.t2 + max(self.left.horizon, self.right.horizon)

    def children(self) -> tuple[StlFormula, ...]:
        return (self.left, self.right)


def walk(formula: StlFormula) -> list[StlFormula]:
    """Pre-order list of all nodes."""
    nodes: list[StlFormula] = []
    stack = [formula]
    while stack:
        node = stack.pop()
        nodes.append(node)
        stack.extend(reversed(node.children()))
    return nodes


def predicate(name: str, op: str, constant: float, coefficient: float = 1.0) -> Predicate:
    """Shorthand for a single-signal predicate, e.g. ``predicate("y", ">", 10)``."""
    return Predicate(((name, float(coefficient)),), Comparator(op), float(constant))
