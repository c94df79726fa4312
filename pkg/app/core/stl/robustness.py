"""
Quantitative STL semantics over discrete-time trajectories.

Robustness is computed bottom-up as a signal: every node maps the trajectory to an
array holding its robustness at each step index where its window fits. Arrays may
carry leading batch dimensions, so a whole batch of rollouts is evaluated at once.

The smooth variant swaps every min/max for log-sum-exp soft-min/soft-max with
sharpness beta. Nested binary soft-mins collapse to one flat soft-min, which keeps
the Until recursion consistent with its flat definition.
"""

from __future__ import annotations

import math
from collections.abc import Mapping, Sequence
from dataclasses import dataclass

import numpy as np
from numpy.lib.stride_tricks import sliding_window_view
from scipy.special import logsumexp

from app.config import settings
from app.core.exceptions import DimensionMismatchError, HorizonTooShortError, UnknownPredicateError
from app.core.registry import get_signal, signal_registry
from app.core.stl.formula import (
    And,
    Finally,
    Globally,
    Not,
    Or,
    Predicate,
    StlFormula,
    TrueFormula,
    Until,
)


@dataclass(frozen=True)
class Trajectory:
    """States s_0 .. s_T of one closed-loop rollout, one row per step."""

    states: np.ndarray
    names: tuple[str, ...]
    dt: float = 1.0

    def __post_init__(self) -> None:
        states = np.array(self.states, dtype=float)
        if states.ndim != 2 or states.shape[0] == 0:
            raise DimensionMismatchError(
                "Trajectory states must be a non-empty (T+1, d) array",
                {"shape": list(states.shape)},
            )
        if states.shape[1] != len(self.names):
            raise DimensionMismatchError(
                f"Trajectory states have dimension {states.shape[1]}, expected {len(self.names)}",
                {"names": list(self.names)},
            )
        if not self.dt > 0:
            raise ValueError(f"dt must be positive, got {self.dt}")
        states.setflags(write=False)
        object.__setattr__(self, "states", states)
        object.__setattr__(self, "names", tuple(self.names))

    @property
    def T(self) -> int:
        return self.states.shape[0] - 1

    def column(self, name: str) -> np.ndarray:
        return self.states[:, self.names.index(name)]


class _Semantics:
    """Exact min/max aggregation."""

    def min2(self, a: np.ndarray, b: np.ndarray) -> np.ndarray:
        return np.minimum(a, b)

    def max2(self, a: np.ndarray, b: np.ndarray) -> np.ndarray:
        return np.maximum(a, b)

    def window_min(self, windows: np.ndarray) -> np.ndarray:
        return windows.min(axis=-1)

    def window_max(self, windows: np.ndarray) -> np.ndarray:
        return windows.max(axis=-1)


class _SmoothSemantics(_Semantics):
    """Log-sum-exp soft-min/soft-max with sharpness beta."""

    def __init__(self, beta: float) -> None:
        if not beta > 0:
            raise ValueError(f"Smoothing sharpness beta must be positive, got {beta}")
        self.beta = float(beta)

    def min2(self, a: np.ndarray, b: np.ndarray) -> np.ndarray:
        return -np.logaddexp(-self.beta * a, -self.beta * b) / self.beta

    def max2(self, a: np.ndarray, b: np.ndarray) -> np.ndarray:
        return np.logaddexp(self.beta * a, self.beta * b) / self.beta

    def window_min(self, windows: np.ndarray) -> np.ndarray:
        if windows.shape[-1] == 1:
            return windows[..., 0]
        return -logsumexp(-self.beta * windows, axis=-1) / self.beta

    def window_max(self, windows: np.ndarray) -> np.ndarray:
        if windows.shape[-1] == 1:
            return windows[..., 0]
        return logsumexp(self.beta * windows, axis=-1) / self.beta


def signal_columns(states: np.ndarray, names: Sequence[str]) -> dict[str, np.ndarray]:
    """Split a (..., n, d) state array into named (..., n) columns."""
    states = np.asarray(states, dtype=float)
    if states.ndim < 2 or states.shape[-1] != len(names):
        raise DimensionMismatchError(
            f"States of shape {states.shape} do not match {len(names)} declared variables",
            {"names": list(names)},
        )
    return {name: states[..., i] for i, name in enumerate(names)}


def signal_values(name: str, columns: Mapping[str, np.ndarray]) -> np.ndarray:
    """Look up a state variable, falling back to registered derived signals."""
    if name in columns:
        return columns[name]
    try:
        signal = get_signal(name)
    except KeyError as e:
        raise UnknownPredicateError(
            f"Unknown signal '{name}'",
            {"name": name, "known": sorted(set(columns) | set(signal_registry))},
            e,
        ) from e
    return signal(columns)


def predicate_margin(pred: Predicate, columns: Mapping[str, np.ndarray]) -> np.ndarray:
    """Signed distance of the affine expression from its threshold (positive when satisfied)."""
    total = 0.0
    for name, coef in pred.terms:
        total = total + coef * signal_values(name, columns)
    return pred.sign * (total - pred.constant)


def _evaluate(
    formula: StlFormula,
    columns: Mapping[str, np.ndarray],
    n: int,
    semantics: _Semantics,
    top: float,
) -> np.ndarray:
    length = n - formula.horizon
    match formula:
        case TrueFormula():
            batch_shape = next(iter(columns.values())).shape[:-1]
            return np.full((*batch_shape, length), top, dtype=float)
        case Predicate():
            return np.asarray(predicate_margin(formula, columns), dtype=float)[..., :length]
        case Not(arg=arg):
            return -_evaluate(arg, columns, n, semantics, top)
        case And(left=left, right=right):
            a = _evaluate(left, columns, n, semantics, top)[..., :length]
            b = _evaluate(right, columns, n, semantics, top)[..., :length]
            return semantics.min2(a, b)
        case Or(left=left, right=right):
            a = _evaluate(left, columns, n, semantics, top)[..., :length]
            b = _evaluate(right, columns, n, semantics, top)[..., :length]
            return semantics.max2(a, b)
        case Globally(t1=t1, t2=t2, arg=arg):
            child = _evaluate(arg, columns, n, semantics, top)
            windows = sliding_window_view(child[..., t1:], t2 - t1 + 1, axis=-1)
            return semantics.window_min(windows)
        case Finally(t1=t1, t2=t2, arg=arg):
            child = _evaluate(arg, columns, n, semantics, top)
            windows = sliding_window_view(child[..., t1:], t2 - t1 + 1, axis=-1)
            return semantics.window_max(windows)
        case Until(t1=t1, t2=t2, left=left, right=right):
            hold = _evaluate(left, columns, n, semantics, top)
            reach = _evaluate(right, columns, n, semantics, top)
            result: np.ndarray | None = None
            prefix: np.ndarray | None = None
            for k in range(t2 + 1):
                if k >= t1:
                    term = reach[..., k : k + length]
                    if prefix is not None:
                        term = semantics.min2(prefix, term)
                    result = term if result is None else semantics.max2(result, term)
                if k < t2:
                    step = hold[..., k : k + length]
                    prefix = step if prefix is None else semantics.min2(prefix, step)
            assert result is not None  # noqa: S101
            return result
    raise TypeError(f"Unsupported formula node {type(formula).__name__}")


def robustness_signal(
    formula: StlFormula,
    states: np.ndarray,
    names: Sequence[str],
    beta: float | None = None,
    top: float | None = None,
) -> np.ndarray:
    """
    Robustness at every step index where the formula's window fits.

    Args:
        formula: STL formula
        states: (..., T+1, d) array of states
        names: Names of the d state variables
        beta: Smoothing sharpness; exact semantics when None
        top: Value of `true` (defaults to settings.TOP_ROBUSTNESS)

    Returns:
        (..., T+1-horizon) array of robustness values

    Raises:
        HorizonTooShortError: If the formula's horizon exceeds the trajectory
        DimensionMismatchError: If states do not match the variable names
    """
    columns = signal_columns(states, names)
    n = np.asarray(states).shape[-2]
    if formula.horizon > n - 1:
        raise HorizonTooShortError(
            f"Formula horizon {formula.horizon} exceeds trajectory length T={n - 1}",
            {"horizon": formula.horizon, "T": n - 1},
        )
    semantics = _Semantics() if beta is None else _SmoothSemantics(beta)
    return _evaluate(formula, columns, n, semantics, settings.TOP_ROBUSTNESS if top is None else top)


def batch_robustness(
    formula: StlFormula,
    states: np.ndarray,
    names: Sequence[str],
    t: int = 0,
    beta: float | None = None,
    top: float | None = None,
) -> np.ndarray:
    """Robustness at step t for a (..., T+1, d) batch of trajectories."""
    n = np.asarray(states).shape[-2]
    _check_index(formula, t, n - 1)
    return robustness_signal(formula, states, names, beta=beta, top=top)[..., t]


def robustness(formula: StlFormula, trajectory: Trajectory, t: int = 0, top: float | None = None) -> float:
    """
    Quantitative robustness rho(s, t, phi); rho >= 0 means the task is satisfied.

    Raises:
        HorizonTooShortError: If t + horizon exceeds T
        DimensionMismatchError: If the trajectory does not match the formula's variables
    """
    return float(batch_robustness(formula, trajectory.states, trajectory.names, t=t, top=top))


def smooth_robustness(
    formula: StlFormula,
    trajectory: Trajectory,
    t: int,
    beta: float,
    top: float | None = None,
) -> float:
    """Log-sum-exp surrogate of robustness, within smooth_error_bound(formula, beta) of the exact value."""
    return float(batch_robustness(formula, trajectory.states, trajectory.names, t=t, beta=beta, top=top))


def _check_index(formula: StlFormula, t: int, T: int) -> None:
    if t < 0:
        raise HorizonTooShortError(f"Evaluation index must be non-negative, got {t}", {"t": t})
    if t + formula.horizon > T:
        raise HorizonTooShortError(
            f"Window t={t} + horizon {formula.horizon} exceeds trajectory length T={T}",
            {"t": t, "horizon": formula.horizon, "T": T},
        )


def log_aggregation_width(formula: StlFormula) -> float:
    """Largest sum of log-arities of min/max aggregations along any root-to-leaf path."""
    match formula:
        case TrueFormula() | Predicate():
            return 0.0
        case Not(arg=arg):
            return log_aggregation_width(arg)
        case And(left=left, right=right) | Or(left=left, right=right):
            return math.log(2) + max(log_aggregation_width(left), log_aggregation_width(right))
        case Globally(t1=t1, t2=t2, arg=arg) | Finally(t1=t1, t2=t2, arg=arg):
            return math.log(t2 - t1 + 1) + log_aggregation_width(arg)
        case Until(t1=t1, t2=t2, left=left, right=right):
            inner = max(log_aggregation_width(left), log_aggregation_width(right))
            return math.log(t2 - t1 + 1) + math.log(t2 + 1) + inner
    raise TypeError(f"Unsupported formula node {type(formula).__name__}")


def max_aggregation_width(formula: StlFormula) -> float:
    """Effective n_max: product of aggregation arities along the worst path."""
    return math.exp(log_aggregation_width(formula))


def smooth_error_bound(formula: StlFormula, beta: float) -> float:
    """Guaranteed bound on |smooth_robustness - robustness| at sharpness beta: ln(n_max) / beta."""
    if not beta > 0:
        raise ValueError(f"Smoothing sharpness beta must be positive, got {beta}")
    return log_aggregation_width(formula) / beta
