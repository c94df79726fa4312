"""
Batched interval arithmetic.

An IntervalBox holds closed bounds of shape (..., n); leading dimensions index
independent boxes (e.g. the sub-boxes of a refined region). Every operation returns
an enclosure of the exact image, widened outward by a relative 1e-12 to absorb
floating-point rounding.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Literal

import numpy as np

from app.core.controller import Activation
from app.core.exceptions import DimensionMismatchError

WIDEN = 1e-12


def widen(lower: np.ndarray, upper: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """Push bounds outward by WIDEN relative to their magnitude."""
    return lower - WIDEN * (1.0 + np.abs(lower)), upper + WIDEN * (1.0 + np.abs(upper))


@dataclass(frozen=True)
class IntervalBox:
    lower: np.ndarray
    upper: np.ndarray

    def __post_init__(self) -> None:
        lower = np.array(self.lower, dtype=float)
        upper = np.array(self.upper, dtype=float)
        if lower.shape != upper.shape or lower.ndim == 0:
            raise DimensionMismatchError(
                f"Interval bounds have shapes {lower.shape} and {upper.shape}",
            )
        if not (np.all(np.isfinite(lower)) and np.all(np.isfinite(upper))):
            raise ValueError("Interval bounds must be finite")
        if np.any(lower > upper):
            raise ValueError("Interval lower bound exceeds upper bound")
        object.__setattr__(self, "lower", lower)
        object.__setattr__(self, "upper", upper)

    @classmethod
    def point(cls, values: np.ndarray) -> IntervalBox:
        values = np.asarray(values, dtype=float)
        return cls(values, values.copy())

    @property
    def dim(self) -> int:
        return self.lower.shape[-1]

    @property
    def center(self) -> np.ndarray:
        return 0.5 * (self.lower + self.upper)

    @property
    def radius(self) -> np.ndarray:
        return 0.5 * (self.upper - self.lower)

    @property
    def width(self) -> np.ndarray:
        return self.upper - self.lower

    def contains(self, points: np.ndarray) -> np.ndarray:
        """Elementwise-all membership of points broadcast against the box."""
        points = np.asarray(points, dtype=float)
        return np.all((points >= self.lower) & (points <= self.upper), axis=-1)

    def column(self, index: int) -> tuple[np.ndarray, np.ndarray]:
        return self.lower[..., index], self.upper[..., index]


def interval_affine(box: IntervalBox, weight: np.ndarray, bias: np.ndarray) -> IntervalBox:
    """
    Image of a box under x -> W x + b in center-radius form.

    Raises:
        DimensionMismatchError: If W's column count differs from the box dimension
    """
    weight = np.asarray(weight, dtype=float)
    if weight.ndim != 2 or weight.shape[1] != box.dim:
        raise DimensionMismatchError(
            f"Weight of shape {weight.shape} cannot act on a box of dimension {box.dim}",
        )
    center = box.center @ weight.T + np.asarray(bias, dtype=float)
    radius = box.radius @ np.abs(weight).T
    return IntervalBox(*widen(center - radius, center + radius))


def interval_activation(box: IntervalBox, activation: Activation | str) -> IntervalBox:
    """Monotone activations map endpoints to endpoints."""
    activation = Activation(activation)
    if activation is Activation.IDENTITY:
        return box
    lower, upper = widen(activation.apply(box.lower), activation.apply(box.upper))
    return IntervalBox(lower, upper)


def interval_trig(
    lower: np.ndarray,
    upper: np.ndarray,
    fn: Literal["sin", "cos"],
    degrees: bool = False,
) -> tuple[np.ndarray, np.ndarray]:
    """
    Enclosure of sin or cos over [lower, upper].

    Endpoint images are widened to +1 (or -1) wherever a maximum (minimum) of the
    function lies inside the interval.
    """
    lower = np.asarray(lower, dtype=float)
    upper = np.asarray(upper, dtype=float)
    period = 360.0 if degrees else 2.0 * np.pi
    quarter = period / 4.0
    if fn == "sin":
        peak, trough, func = quarter, 3.0 * quarter, np.sin
    elif fn == "cos":
        peak, trough, func = 0.0, 2.0 * quarter, np.cos
    else:
        raise ValueError(f"Unsupported trigonometric function '{fn}'")

    scale = np.pi / 180.0 if degrees else 1.0
    at_lower = func(lower * scale)
    at_upper = func(upper * scale)
    lo = np.minimum(at_lower, at_upper)
    hi = np.maximum(at_lower, at_upper)

    def _contains(offset: float) -> np.ndarray:
        first = np.ceil((lower - offset) / period)
        return first * period + offset <= upper

    hi = np.where(_contains(peak), 1.0, hi)
    lo = np.where(_contains(trough), -1.0, lo)
    lo, hi = widen(lo, hi)
    return np.maximum(lo, -1.0), np.minimum(hi, 1.0)


def interval_mul(
    a_lower: np.ndarray,
    a_upper: np.ndarray,
    b_lower: np.ndarray,
    b_upper: np.ndarray,
) -> tuple[np.ndarray, np.ndarray]:
    products = np.stack(
        [a_lower * b_lower, a_lower * b_upper, a_upper * b_lower, a_upper * b_upper],
        axis=0,
    )
    return widen(products.min(axis=0), products.max(axis=0))


def interval_clip(
    lower: np.ndarray,
    upper: np.ndarray,
    low: float,
    high: float,
) -> tuple[np.ndarray, np.ndarray]:
    """Image of [lower, upper] under clip(., low, high); clip is monotone."""
    return np.clip(lower, low, high), np.clip(upper, low, high)
