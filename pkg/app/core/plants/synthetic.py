"""
Small plants with closed-form behaviour, used to exercise the repair pipeline.

- toy:   x' = x + clip(u, -1, 1); the task asks for x >= 0 one step ahead.
- shift: (p, q)' = (p, p); the controller is ignored. Every trajectory satisfies
         p - q > -0.5, but the interval enclosure of p - q at step 1 is [-1, 1] on the
         default region, so the verifier rejects a region that is entirely safe.
- hold:  x' = x; robustness equals the initial state, handy for checking Monte
         Carlo estimates against quadrature.
"""

import numpy as np

from app.core.controller import Activation
from app.core.plants.base import BasePlant
from app.core.registry import register_plant
from app.core.verifier.interval import IntervalBox, widen


@register_plant("toy")
class ToyPlant(BasePlant):
    name = "toy"
    state_names = ("x",)
    action_low = -1.0
    action_high = 1.0
    horizon = 1
    formula = "G[1,1](x >= 0)"

    free_dims = (0,)
    initial_lower = (-0.05,)
    initial_upper = (0.05,)
    partition_steps = (0.05,)
    fixed_state = (0.0,)

    layer_sizes = (1, 1)
    activations = (Activation.IDENTITY,)

    def observe(self, states: np.ndarray) -> np.ndarray:
        return np.asarray(states, dtype=float)

    def step(self, states: np.ndarray, actions: np.ndarray) -> np.ndarray:
        return np.asarray(states, dtype=float) + np.asarray(actions, dtype=float)

    def observe_box(self, box: IntervalBox) -> IntervalBox:
        return box

    def step_box(self, box: IntervalBox, actions: IntervalBox) -> IntervalBox:
        return IntervalBox(*widen(box.lower + actions.lower, box.upper + actions.upper))


@register_plant("shift")
class ShiftPlant(BasePlant):
    name = "shift"
    state_names = ("p", "q")
    action_low = -1.0
    action_high = 1.0
    horizon = 1
    formula = "G[0,1](p - q > -0.5)"

    free_dims = (0, 1)
    initial_lower = (0.0, 0.0)
    initial_upper = (1.0, 0.1)
    partition_steps = (1.0, 0.1)
    fixed_state = (0.0, 0.0)

    layer_sizes = (2, 1)
    activations = (Activation.IDENTITY,)

    def observe(self, states: np.ndarray) -> np.ndarray:
        return np.asarray(states, dtype=float)

    def step(self, states: np.ndarray, actions: np.ndarray) -> np.ndarray:
        states = np.asarray(states, dtype=float)
        return np.stack([states[..., 0], states[..., 0]], axis=-1)

    def observe_box(self, box: IntervalBox) -> IntervalBox:
        return box

    def step_box(self, box: IntervalBox, actions: IntervalBox) -> IntervalBox:
        p_lo, p_hi = box.column(0)
        return IntervalBox(np.stack([p_lo, p_lo], axis=-1), np.stack([p_hi, p_hi], axis=-1))


@register_plant("hold")
class HoldPlant(BasePlant):
    name = "hold"
    state_names = ("x",)
    action_low = -1.0
    action_high = 1.0
    horizon = 1
    formula = "G[0,1](x > 0)"

    free_dims = (0,)
    initial_lower = (-1.0,)
    initial_upper = (3.0,)
    partition_steps = (1.0,)
    fixed_state = (0.0,)

    layer_sizes = (1, 1)
    activations = (Activation.IDENTITY,)

    def observe(self, states: np.ndarray) -> np.ndarray:
        return np.asarray(states, dtype=float)

    def step(self, states: np.ndarray, actions: np.ndarray) -> np.ndarray:
        return np.asarray(states, dtype=float).copy()

    def observe_box(self, box: IntervalBox) -> IntervalBox:
        return box

    def step_box(self, box: IntervalBox, actions: IntervalBox) -> IntervalBox:
        return box
