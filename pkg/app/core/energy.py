"""
Barrier-guarded Monte Carlo energy.

    e_hat(theta) = mean_{s in S_i} rob(s, theta) + lam * mean_{s in S_s} log_barrier(rob(s, theta))

The first term rewards the region under repair; the second keeps protected
states' robustness positive. rho_min, the smallest protected robustness, is what
the annealer's safeguard checks.
"""

from __future__ import annotations

import hashlib
import itertools
from collections import OrderedDict
from typing import NamedTuple

import numpy as np
from pydantic import BaseModel, ConfigDict, Field

from app.config import settings
from app.core.controller import MlpParams
from app.core.exceptions import EnergyError
from app.core.plants.base import BasePlant
from app.core.region import Region
from app.core.simulation import rob_batch
from app.core.stl import StlFormula
from app.workers.pool import WorkPool

MIN_GRID_DENSITY = 50


class EnergyConfig(BaseModel):
    """Energy hyperparameters; the protected-region count L is implied by the sample set."""

    model_config = ConfigDict(frozen=True, extra="forbid")

    lam: float = Field(default=1.0, ge=0.0, description="Balance factor of the barrier term")
    barrier_floor: float = Field(default=-1000.0, lt=0.0, description="Lower bound of the log barrier")
    K: int = Field(default=100, ge=1, description="Samples per region")


class EnergyEstimate(NamedTuple):
    energy: float
    rho_min: float


def log_barrier(rho: np.ndarray | float, floor: float = -1000.0) -> np.ndarray | float:
    """max(floor, ln rho) for rho > 0, floor otherwise."""
    rho_arr = np.asarray(rho, dtype=float)
    positive = rho_arr > 0
    with np.errstate(divide="ignore", invalid="ignore"):
        logs = np.log(np.where(positive, rho_arr, 1.0))
    result = np.where(positive, np.maximum(floor, logs), floor)
    return float(result) if np.ndim(rho) == 0 else result


class RobustnessOracle:
    """
    rob_batch with a bounded cache keyed by (controller digest, sample set).

    The annealer and the repair driver ask for the same (theta, states) pairs
    repeatedly; cached arrays are returned read-only.
    """

    def __init__(
        self,
        plant: BasePlant,
        formula: StlFormula,
        pool: WorkPool | None = None,
        max_entries: int = 64,
    ) -> None:
        self.plant = plant
        self.formula = formula
        self.pool = pool
        self.max_entries = max_entries
        self.evaluations = 0
        self._cache: OrderedDict[tuple[str, str], np.ndarray] = OrderedDict()

    def __call__(self, params: MlpParams, states: np.ndarray) -> np.ndarray:
        states = np.ascontiguousarray(states, dtype=float)
        if states.shape[0] == 0:
            return np.empty(0)
        key = (params.digest(), hashlib.sha256(states.tobytes() + repr(states.shape).encode()).hexdigest())
        cached = self._cache.get(key)
        if cached is not None:
            self._cache.move_to_end(key)
            return cached
        values = rob_batch(self.plant, self.formula, params, states, self.pool)
        values.setflags(write=False)
        self.evaluations += states.shape[0]
        self._cache[key] = values
        if len(self._cache) > self.max_entries:
            self._cache.popitem(last=False)
        return values


def energy_from_robustness(
    repair_robs: np.ndarray,
    protected_robs: np.ndarray,
    cfg: EnergyConfig,
) -> EnergyEstimate:
    """Energy and rho_min from already computed robustness values."""
    if repair_robs.size == 0:
        raise EnergyError("Energy needs at least one sample of the region under repair")
    energy = float(np.mean(repair_robs))
    if protected_robs.size == 0:
        return EnergyEstimate(energy, settings.TOP_ROBUSTNESS)
    energy += cfg.lam * float(np.mean(log_barrier(protected_robs, cfg.barrier_floor)))
    return EnergyEstimate(energy, float(np.min(protected_robs)))


def evaluate_energy(
    repair_states: np.ndarray,
    protected_states: np.ndarray,
    params: MlpParams,
    plant: BasePlant,
    formula: StlFormula,
    cfg: EnergyConfig,
    oracle: RobustnessOracle | None = None,
) -> EnergyEstimate:
    """
    Monte Carlo energy e_hat(theta) and the protected minimum robustness.

    Args:
        repair_states: (n, state_dim) samples of the region under repair
        protected_states: (m, state_dim) protected samples; m = 0 drops the barrier
        params: Controller parameters
        plant: Plant model
        formula: Task formula
        cfg: Energy hyperparameters
        oracle: Optional shared robustness cache

    Returns:
        (energy, rho_min); rho_min is the top robustness value when m = 0

    Raises:
        EnergyError: If repair_states is empty
    """
    repair_states = np.asarray(repair_states, dtype=float)
    if repair_states.shape[0] == 0:
        raise EnergyError("Energy needs at least one sample of the region under repair")
    oracle = oracle or RobustnessOracle(plant, formula)
    return energy_from_robustness(oracle(params, repair_states), oracle(params, protected_states), cfg)


def _midpoint_grid(region: Region, density: int) -> np.ndarray:
    axes = [lo + (np.arange(density) + 0.5) * (hi - lo) / density for lo, hi in zip(region.lower, region.upper, strict=True)]
    return np.array(list(itertools.product(*axes)))


def exact_energy_oracle(
    region: Region,
    protected_regions: list[Region],
    params: MlpParams,
    plant: BasePlant,
    formula: StlFormula,
    cfg: EnergyConfig,
    grid_density: int = MIN_GRID_DENSITY,
) -> float:
    """
    Midpoint-rule quadrature of the integral energy

        (1/|S_i|) int_{S_i} rob + (lam/|S_s|) int_{S_s} log_barrier(rob)

    where S_s is the union of the protected regions.
    """
    if grid_density < MIN_GRID_DENSITY:
        raise EnergyError(f"Grid density must be at least {MIN_GRID_DENSITY}, got {grid_density}")
    repair = float(np.mean(rob_batch(plant, formula, params, plant.embed(_midpoint_grid(region, grid_density)))))
    if not protected_regions:
        return repair
    total_volume = sum(r.volume for r in protected_regions)
    barrier = 0.0
    for protected in protected_regions:
        robs = rob_batch(plant, formula, params, plant.embed(_midpoint_grid(protected, grid_density)))
        barrier += protected.volume * float(np.mean(log_barrier(robs, cfg.barrier_floor)))
    return repair + cfg.lam * barrier / total_volume
