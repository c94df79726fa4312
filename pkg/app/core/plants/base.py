from abc import ABC, abstractmethod
from typing import ClassVar

import numpy as np

from app.core.controller import Activation
from app.core.exceptions import DimensionMismatchError
from app.core.verifier.interval import IntervalBox


class BasePlant(ABC):
    """
    Abstract base class for closed-loop plant models.

    A plant declares its state variables, the observation and action maps around the
    controller, the deterministic step map, and an interval version of each so the
    verifier can push boxes through the loop. All maps are batched over leading
    dimensions.
    """

    name: ClassVar[str]
    state_names: ClassVar[tuple[str, ...]]
    action_dim: ClassVar[int] = 1
    action_low: ClassVar[float]
    action_high: ClassVar[float]
    horizon: ClassVar[int]
    formula: ClassVar[str]

    # Initial-state space over the free coordinates; the others are fixed.
    free_dims: ClassVar[tuple[int, ...]]
    initial_lower: ClassVar[tuple[float, ...]]
    initial_upper: ClassVar[tuple[float, ...]]
    partition_steps: ClassVar[tuple[float, ...]]
    fixed_state: ClassVar[tuple[float, ...]]

    layer_sizes: ClassVar[tuple[int, ...]]
    activations: ClassVar[tuple[Activation, ...]]

    @property
    def state_dim(self) -> int:
        return len(self.state_names)

    @property
    def obs_dim(self) -> int:
        return self.layer_sizes[0]

    def embed(self, free_points: np.ndarray) -> np.ndarray:
        """Complete free initial coordinates (..., k) into full states (..., state_dim)."""
        free_points = np.asarray(free_points, dtype=float)
        if free_points.shape[-1] != len(self.free_dims):
            raise DimensionMismatchError(
                f"Initial points have {free_points.shape[-1]} coordinates, {self.name} has {len(self.free_dims)} free",
            )
        states = np.broadcast_to(np.asarray(self.fixed_state, dtype=float), (*free_points.shape[:-1], self.state_dim))
        states = states.copy()
        states[..., list(self.free_dims)] = free_points
        return states

    def embed_box(self, lower: np.ndarray, upper: np.ndarray) -> IntervalBox:
        return IntervalBox(self.embed(lower), self.embed(upper))

    def act(self, raw: np.ndarray) -> np.ndarray:
        """Scale and clamp raw network output into the action box."""
        return np.clip(raw, self.action_low, self.action_high)

    def act_box(self, raw: IntervalBox) -> IntervalBox:
        # act is monotone non-decreasing in every coordinate
        return IntervalBox(self.act(raw.lower), self.act(raw.upper))

    @abstractmethod
    def observe(self, states: np.ndarray) -> np.ndarray:
        """Observation fed to the controller."""
        pass

    @abstractmethod
    def step(self, states: np.ndarray, actions: np.ndarray) -> np.ndarray:
        """One deterministic transition s_{t+1} = f(s_t, a_t)."""
        pass

    @abstractmethod
    def observe_box(self, box: IntervalBox) -> IntervalBox:
        pass

    @abstractmethod
    def step_box(self, box: IntervalBox, actions: IntervalBox) -> IntervalBox:
        """Enclosure of every successor of every state in box under every action in actions."""
        pass

