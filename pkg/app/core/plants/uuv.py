"""
Unmanned underwater vehicle following a pipe along the x-axis.

State (x, y, h, v): position in metres, heading in degrees, fixed speed. The
controller sees (h, y - 10), the heading and the distance to the pipe's lower edge,
and commands a heading change of at most 5 degrees per one-second step.
"""

from collections.abc import Mapping

import numpy as np

from app.core.controller import Activation
from app.core.plants.base import BasePlant
from app.core.registry import register_plant, register_signal
from app.core.verifier.interval import IntervalBox, interval_mul, interval_trig, widen

UUV_SPEED = 0.4855
MAX_TURN_DEG = 5.0
PIPE_LOWER = 10.0
PIPE_UPPER = 50.0


def step_uuv(states: np.ndarray, turn: np.ndarray) -> np.ndarray:
    """
    Unicycle kinematics with dt = 1 s and heading in degrees.

    Args:
        states: (..., 4) array of (x, y, h, v)
        turn: (...,) or (..., 1) heading change in degrees, already clamped

    Returns:
        (..., 4) successor states
    """
    states = np.asarray(states, dtype=float)
    turn = np.asarray(turn, dtype=float)
    if turn.ndim == states.ndim:
        turn = turn[..., 0]
    x, y, h, v = (states[..., i] for i in range(4))
    rad = np.deg2rad(h)
    return np.stack([x + v * np.cos(rad), y + v * np.sin(rad), h + turn, v], axis=-1)


@register_signal("pipe_distance")
def pipe_distance(columns: Mapping[str, np.ndarray]) -> np.ndarray:
    return columns["y"] - PIPE_LOWER


@register_plant("uuv")
class UuvPlant(BasePlant):
    name = "uuv"
    state_names = ("x", "y", "h", "v")
    action_low = -MAX_TURN_DEG
    action_high = MAX_TURN_DEG
    horizon = 30
    formula = f"G[0,30](y > {PIPE_LOWER} & y < {PIPE_UPPER})"

    free_dims = (1, 2)
    initial_lower = (12.0, 10.0)
    initial_upper = (22.0, 30.0)
    partition_steps = (0.1, 1.0)
    fixed_state = (0.0, 0.0, 0.0, UUV_SPEED)

    layer_sizes = (2, 32, 32, 1)
    activations = (Activation.TANH, Activation.TANH, Activation.TANH)

    def observe(self, states: np.ndarray) -> np.ndarray:
        states = np.asarray(states, dtype=float)
        return np.stack([states[..., 2], states[..., 1] - PIPE_LOWER], axis=-1)

    def act(self, raw: np.ndarray) -> np.ndarray:
        return np.clip(MAX_TURN_DEG * np.asarray(raw, dtype=float), -MAX_TURN_DEG, MAX_TURN_DEG)

    def step(self, states: np.ndarray, actions: np.ndarray) -> np.ndarray:
        return step_uuv(states, actions)

    def observe_box(self, box: IntervalBox) -> IntervalBox:
        y_lo, y_hi = box.column(1)
        h_lo, h_hi = box.column(2)
        lower, upper = widen(np.stack([h_lo, y_lo - PIPE_LOWER], axis=-1), np.stack([h_hi, y_hi - PIPE_LOWER], axis=-1))
        return IntervalBox(lower, upper)

    def step_box(self, box: IntervalBox, actions: IntervalBox) -> IntervalBox:
        x_lo, x_hi = box.column(0)
        y_lo, y_hi = box.column(1)
        h_lo, h_hi = box.column(2)
        v_lo, v_hi = box.column(3)
        cos_lo, cos_hi = interval_trig(h_lo, h_hi, "cos", degrees=True)
        sin_lo, sin_hi = interval_trig(h_lo, h_hi, "sin", degrees=True)
        dx_lo, dx_hi = interval_mul(v_lo, v_hi, cos_lo, cos_hi)
        dy_lo, dy_hi = interval_mul(v_lo, v_hi, sin_lo, sin_hi)
        turn_lo, turn_hi = actions.column(0)
        lower = np.stack([x_lo + dx_lo, y_lo + dy_lo, h_lo + turn_lo, v_lo], axis=-1)
        upper = np.stack([x_hi + dx_hi, y_hi + dy_hi, h_hi + turn_hi, v_hi], axis=-1)
        return IntervalBox(*widen(lower, upper))
