"""
Closed-loop rollouts and the robustness subroutine rob(s0, theta).
"""

import numpy as np

from app.core.controller import MlpParams, controller_eval
from app.core.exceptions import DimensionMismatchError, HorizonTooShortError
from app.core.plants.base import BasePlant
from app.core.stl import StlFormula, Trajectory, batch_robustness
from app.workers.pool import WorkPool, map_chunks


def rollout_batch(plant: BasePlant, params: MlpParams, initial: np.ndarray, T: int) -> np.ndarray:
    """
    Simulate a batch of closed-loop trajectories.

    Args:
        plant: Plant model
        params: Controller parameters
        initial: (B, state_dim) initial states
        T: Number of steps

    Returns:
        (B, T+1, state_dim) array of visited states
    """
    if T < 1:
        raise HorizonTooShortError(f"Rollout length must be at least 1, got {T}", {"T": T})
    states = np.asarray(initial, dtype=float)
    if states.ndim != 2 or states.shape[-1] != plant.state_dim:
        raise DimensionMismatchError(
            f"Initial states of shape {states.shape} do not match {plant.name} state dimension {plant.state_dim}",
        )
    visited = np.empty((states.shape[0], T + 1, plant.state_dim))
    visited[:, 0] = states
    for t in range(T):
        actions = plant.act(controller_eval(params, plant.observe(states)))
        states = plant.step(states, actions)
        visited[:, t + 1] = states
    return visited


def rollout(plant: BasePlant, params: MlpParams, s0: np.ndarray, T: int | None = None) -> Trajectory:
    """Single trajectory s_0 .. s_T (T defaults to the plant's horizon)."""
    states = rollout_batch(plant, params, np.asarray(s0, dtype=float)[None, :], plant.horizon if T is None else T)
    return Trajectory(states[0], plant.state_names)


def rob_batch(
    plant: BasePlant,
    formula: StlFormula,
    params: MlpParams,
    initial: np.ndarray,
    pool: WorkPool | None = None,
) -> np.ndarray:
    """
    Robustness of the formula at t = 0 for every initial state.

    Rollouts run for the plant's horizon in fixed-size chunks; the chunking does not
    depend on the pool, so results are identical with or without one.
    """
    initial = np.asarray(initial, dtype=float)
    if initial.shape[0] == 0:
        return np.empty(0)
    if formula.horizon > plant.horizon:
        raise HorizonTooShortError(
            f"Formula horizon {formula.horizon} exceeds the {plant.name} horizon {plant.horizon}",
            {"horizon": formula.horizon, "T": plant.horizon},
        )

    def _evaluate(chunk: np.ndarray) -> np.ndarray:
        states = rollout_batch(plant, params, chunk, plant.horizon)
        return batch_robustness(formula, states, plant.state_names)

    return np.concatenate(map_chunks(_evaluate, initial, pool))


def rob(plant: BasePlant, formula: StlFormula, s0: np.ndarray, params: MlpParams) -> float:
    """rob_{f,phi}(s0, pi): robustness of the rollout from s0 at step 0."""
    return float(rob_batch(plant, formula, params, np.asarray(s0, dtype=float)[None, :])[0])
