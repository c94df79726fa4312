"""
Seed-controller synthesis.

Produces a deliberately imperfect controller for a plant: starting from a random
network, a random search moves the mean robustness over a coarse grid of initial
states toward zero and stops at the first controller that both succeeds and fails on
the grid. Such a controller leaves some regions to repair and some to protect.
"""

import numpy as np
from loguru import logger

from app.core.controller import MlpParams
from app.core.exceptions import SynthesisError
from app.core.plants.base import BasePlant
from app.core.simulation import rob_batch
from app.core.stl import StlFormula
from app.workers.pool import WorkPool


def initial_grid(plant: BasePlant, points_per_dim: int) -> np.ndarray:
    """Cell-midpoint grid over the plant's initial box, embedded into full states."""
    axes = [
        lo + (np.arange(points_per_dim) + 0.5) * (hi - lo) / points_per_dim
        for lo, hi in zip(plant.initial_lower, plant.initial_upper, strict=True)
    ]
    mesh = np.meshgrid(*axes, indexing="ij")
    free = np.stack([m.ravel() for m in mesh], axis=-1)
    return plant.embed(free)


def _is_mixed(robs: np.ndarray) -> bool:
    return bool(np.any(robs >= 0) and np.any(robs < 0))


def synthesize_seed_controller(
    plant: BasePlant,
    formula: StlFormula,
    budget: int,
    seed: int,
    grid_points: int = 5,
    step_size: float = 0.5,
    pool: WorkPool | None = None,
) -> MlpParams:
    """
    Search for a controller that succeeds on some grid states and fails on others.

    Args:
        plant: Plant whose layer sizes and activations define the architecture
        formula: Task formula
        budget: Maximum number of candidate controllers evaluated after the first
        seed: Seed of the search; the result is a pure function of it
        grid_points: Grid resolution per free initial coordinate
        step_size: Standard deviation of the random-search perturbation
        pool: Optional work pool for rollouts

    Returns:
        A controller with mixed outcomes on the grid

    Raises:
        SynthesisError: If budget < 1 or no mixed controller is found within budget
    """
    if budget < 1:
        raise SynthesisError(f"Synthesis budget must be at least 1, got {budget}", {"budget": budget})

    rng = np.random.Generator(np.random.Philox(np.random.SeedSequence(seed)))
    grid = initial_grid(plant, grid_points)
    params = MlpParams.build(plant.layer_sizes, plant.activations, rng)
    robs = rob_batch(plant, formula, params, grid, pool)
    logger.info(
        f"Synthesizing seed controller for {plant.name}: {len(grid)} grid states, budget {budget}, seed {seed}",
    )

    for attempt in range(budget):
        if _is_mixed(robs):
            logger.info(
                f"Found mixed controller after {attempt} candidates "
                f"({int(np.sum(robs >= 0))} succeed, {int(np.sum(robs < 0))} fail)",
            )
            return params
        # all fail: climb toward success; all succeed: descend toward failure
        direction = 1.0 if np.all(robs < 0) else -1.0
        theta = params.to_vector()
        candidate = params.with_vector(theta + rng.normal(0.0, step_size, size=theta.shape))
        candidate_robs = rob_batch(plant, formula, candidate, grid, pool)
        if _is_mixed(candidate_robs) or direction * candidate_robs.mean() > direction * robs.mean():
            params, robs = candidate, candidate_robs
            logger.debug(f"Candidate {attempt + 1}: mean robustness {robs.mean():.4f}")

    if _is_mixed(robs):
        return params
    raise SynthesisError(
        f"No mixed controller for {plant.name} within {budget} candidates",
        {"budget": budget, "seed": seed, "succeeding": int(np.sum(robs >= 0))},
    )
