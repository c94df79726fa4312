"""
Continuous mountain car with the standard environment constants.

State (x, v); the car must reach x >= 0.45 within 110 steps. Positions are clamped
to [-1.2, 0.6] and velocities to [-0.07, 0.07]; hitting the left wall stops the car.
"""

from collections.abc import Mapping

import numpy as np

from app.core.controller import Activation
from app.core.plants.base import BasePlant
from app.core.registry import register_plant, register_signal
from app.core.verifier.interval import IntervalBox, interval_clip, interval_trig, widen

POWER = 0.0015
GRAVITY = 0.0025
MIN_POSITION = -1.2
MAX_POSITION = 0.6
MAX_SPEED = 0.07
GOAL_POSITION = 0.45


def step_mc(states: np.ndarray, force: np.ndarray) -> np.ndarray:
    """
    One mountain-car transition.

    Args:
        states: (..., 2) array of (x, v)
        force: (...,) or (..., 1) action in [-1, 1]

    Returns:
        (..., 2) successor states
    """
    states = np.asarray(states, dtype=float)
    force = np.asarray(force, dtype=float)
    if force.ndim == states.ndim:
        force = force[..., 0]
    x, v = states[..., 0], states[..., 1]
    v_next = np.clip(v + POWER * force - GRAVITY * np.cos(3.0 * x), -MAX_SPEED, MAX_SPEED)
    x_next = np.clip(x + v_next, MIN_POSITION, MAX_POSITION)
    v_next = np.where((x_next == MIN_POSITION) & (v_next < 0), 0.0, v_next)
    return np.stack([x_next, v_next], axis=-1)


@register_signal("height")
def height(columns: Mapping[str, np.ndarray]) -> np.ndarray:
    return 0.45 * np.sin(3.0 * columns["x"]) + 0.55


@register_plant("mc")
class MountainCarPlant(BasePlant):
    name = "mc"
    state_names = ("x", "v")
    action_low = -1.0
    action_high = 1.0
    horizon = 110
    formula = f"F[0,110](x >= {GOAL_POSITION})"

    free_dims = (0, 1)
    initial_lower = (-0.505, -0.055)
    initial_upper = (0.395, 0.045)
    partition_steps = (0.03, 0.1 / 30)
    fixed_state = (0.0, 0.0)

    layer_sizes = (2, 16, 16, 1)
    activations = (Activation.SIGMOID, Activation.SIGMOID, Activation.TANH)

    def observe(self, states: np.ndarray) -> np.ndarray:
        return np.asarray(states, dtype=float)

    def step(self, states: np.ndarray, actions: np.ndarray) -> np.ndarray:
        return step_mc(states, actions)

    def observe_box(self, box: IntervalBox) -> IntervalBox:
        return box

    def step_box(self, box: IntervalBox, actions: IntervalBox) -> IntervalBox:
        x_lo, x_hi = box.column(0)
        v_lo, v_hi = box.column(1)
        a_lo, a_hi = actions.column(0)
        cos_lo, cos_hi = interval_trig(3.0 * x_lo, 3.0 * x_hi, "cos")
        nv_lo, nv_hi = widen(v_lo + POWER * a_lo - GRAVITY * cos_hi, v_hi + POWER * a_hi - GRAVITY * cos_lo)
        nv_lo, nv_hi = interval_clip(nv_lo, nv_hi, -MAX_SPEED, MAX_SPEED)
        nx_lo, nx_hi = widen(x_lo + nv_lo, x_hi + nv_hi)
        nx_lo, nx_hi = interval_clip(nx_lo, nx_hi, MIN_POSITION, MAX_POSITION)
        # a wall stop maps negative velocities to 0
        nv_hi = np.where(nx_lo <= MIN_POSITION, np.maximum(nv_hi, 0.0), nv_hi)
        return IntervalBox(np.stack([nx_lo, nv_lo], axis=-1), np.stack([nx_hi, nv_hi], axis=-1))
