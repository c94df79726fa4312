"""
Text syntax for STL formulas.

Grammar (ASCII, whitespace-insensitive)::

    true
    <expr> (<|<=|>|>=) <const>        expr = linear combination of named signals
    !phi    phi & psi    phi | psi
    G[a,b](phi)    F[a,b](phi)    U[a,b](phi, psi)

`&` binds tighter than `|`; both associate to the left. `format_formula` prints a
fully parenthesized form that parses back to an equal tree.
"""

from __future__ import annotations

import math
from collections.abc import Iterable

from lark import Lark, Transformer, v_args
from lark.exceptions import UnexpectedEOF, UnexpectedInput, VisitError

from app.core.exceptions import FormulaSyntaxError, RepairToolkitError, UnknownPredicateError
from app.core.registry import signal_registry
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
)

GRAMMAR = r"""
?start: disjunction

?disjunction: conjunction
    | disjunction "|" conjunction                           -> or_

?conjunction: unary
    | conjunction "&" unary                                 -> and_

?unary: "!" unary                                           -> not_
    | "G" interval "(" disjunction ")"                      -> globally
    | "F" interval "(" disjunction ")"                      -> finally_
    | "U" interval "(" disjunction "," disjunction ")"      -> until
    | "(" disjunction ")"
    | "true"                                                -> true
    | comparison

interval: "[" INT "," INT "]"

comparison: linexpr COMPARATOR SIGNED_NUMBER

linexpr: first_term (ADDOP term)*

first_term: ADDOP? term

term: NUMBER "*" NAME                                       -> scaled_term
    | NAME                                                  -> unit_term

COMPARATOR: ">=" | "<=" | ">" | "<"
ADDOP: "+" | "-"
NAME: /[A-Za-z_][A-Za-z0-9_]*/

%import common.INT
%import common.NUMBER
%import common.SIGNED_NUMBER
%import common.WS
%ignore WS
"""

_parser = Lark(GRAMMAR, parser="lalr", start="start")


@v_args(inline=True)
class _FormulaBuilder(Transformer):
    """Translate the Lark parse tree into formula nodes."""

    def true(self) -> TrueFormula:
        return TrueFormula()

    def not_(self, arg: StlFormula) -> Not:
        return Not(arg)

    def and_(self, left: StlFormula, right: StlFormula) -> And:
        return And(left, right)

    def or_(self, left: StlFormula, right: StlFormula) -> Or:
        return Or(left, right)

    def interval(self, t1: str, t2: str) -> tuple[int, int]:
        return int(t1), int(t2)

    def globally(self, window: tuple[int, int], arg: StlFormula) -> Globally:
        return Globally(window[0], window[1], arg)

    def finally_(self, window: tuple[int, int], arg: StlFormula) -> Finally:
        return Finally(window[0], window[1], arg)

    def until(self, window: tuple[int, int], left: StlFormula, right: StlFormula) -> Until:
        return Until(window[0], window[1], left, right)

    def scaled_term(self, coef: str, name: str) -> tuple[str, float]:
        return str(name), float(coef)

    def unit_term(self, name: str) -> tuple[str, float]:
        return str(name), 1.0

    def first_term(self, *parts: object) -> tuple[str, float]:
        if len(parts) == 2:
            sign, (name, coef) = parts
            return name, -coef if sign == "-" else coef
        (term,) = parts
        return term

    def linexpr(self, first: tuple[str, float], *rest: object) -> tuple[tuple[str, float], ...]:
        terms = [first]
        for sign, (name, coef) in zip(rest[::2], rest[1::2], strict=True):
            terms.append((name, -coef if sign == "-" else coef))
        return tuple(terms)

    def comparison(self, terms: tuple[tuple[str, float], ...], op: str, constant: str) -> Predicate:
        return Predicate(terms, Comparator(str(op)), float(constant))


def parse_formula(text: str, known_names: Iterable[str] | None = None) -> StlFormula:
    """
    Parse formula text into an AST.

    Args:
        text: Formula in the documented grammar
        known_names: State-variable names of the target plant; when given, every
            referenced signal must be one of them or a registered derived signal

    Returns:
        Parsed formula

    Raises:
        FormulaSyntaxError: If the text does not match the grammar
        UnknownPredicateError: If a referenced signal name is not known
        FormulaError: If a temporal window is invalid (e.g. t1 > t2)
    """
    try:
        tree = _parser.parse(text)
        formula = _FormulaBuilder().transform(tree)
    except UnexpectedEOF as e:
        raise FormulaSyntaxError("Unexpected end of formula", len(text), e) from e
    except UnexpectedInput as e:
        raise FormulaSyntaxError(f"Invalid formula syntax: {type(e).__name__}", e.pos_in_stream or 0, e) from e
    except VisitError as e:
        if isinstance(e.orig_exc, RepairToolkitError):
            raise e.orig_exc from e
        raise

    if known_names is not None:
        allowed = set(known_names) | set(signal_registry)
        unknown = sorted(formula.signal_names() - allowed)
        if unknown:
            raise UnknownPredicateError(
                f"Formula references unknown signals: {unknown}",
                {"unknown": unknown, "known": sorted(allowed)},
            )
    return formula


def _format_coefficient(coef: float, name: str) -> str:
    magnitude = abs(coef)
    return name if magnitude == 1.0 else f"{magnitude!r}*{name}"


def _format_predicate(pred: Predicate) -> str:
    parts: list[str] = []
    for index, (name, coef) in enumerate(pred.terms):
        negative = math.copysign(1.0, coef) < 0
        body = _format_coefficient(coef, name)
        if index == 0:
            parts.append(f"-{body}" if negative else body)
        else:
            parts.append(f"- {body}" if negative else f"+ {body}")
    return f"{' '.join(parts)} {pred.op.value} {pred.constant!r}"


def format_formula(formula: StlFormula) -> str:
    """Print a formula in parseable text form."""
    match formula:
        case TrueFormula():
            return "true"
        case Predicate():
            return _format_predicate(formula)
        case Not(arg=arg):
            return f"!({format_formula(arg)})"
        case And(left=left, right=right):
            return f"({format_formula(left)}) & ({format_formula(right)})"
        case Or(left=left, right=right):
            return f"({format_formula(left)}) | ({format_formula(right)})"
        case Globally(t1=t1, t2=t2, arg=arg):
            return f"G[{t1},{t2}]({format_formula(arg)})"
        case Finally(t1=t1, t2=t2, arg=arg):
            return f"F[{t1},{t2}]({format_formula(arg)})"
        case Until(t1=t1, t2=t2, left=left, right=right):
            return f"U[{t1},{t2}]({format_formula(left)}, {format_formula(right)})"
    raise TypeError(f"Unsupported formula node {type(formula).__name__}")
