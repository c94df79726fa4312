"""
Gradient-ascent baseline.

Climbs the smoothed barrier energy with central finite-difference gradients and
keeps a step only if every protected sample still has non-negative (exact)
robustness. Each step size is tried from the same start; the best result by exact
energy is returned.
"""

from collections.abc import Callable
from dataclasses import dataclass

import numpy as np
from loguru import logger
from pydantic import BaseModel, ConfigDict, Field

from app.config import settings
from app.core.controller import MlpParams
from app.core.energy import EnergyConfig, RobustnessOracle, energy_from_robustness, log_barrier
from app.core.plants.base import BasePlant
from app.core.registry import register_optimizer
from app.core.services.annealing import OptimizerResult, RepairOptimizer
from app.core.simulation import rollout_batch
from app.core.stl import StlFormula, batch_robustness
from app.schemas.report import IterationRecord


class GradientConfig(BaseModel):
    model_config = ConfigDict(frozen=True, extra="forbid")

    etas: tuple[float, ...] = Field(default=(0.01, 0.001, 0.0001), min_length=1, description="Step sizes to try")
    steps: int = Field(default=10, ge=1, description="Ascent steps per step size")
    fd_step: float = Field(default=1e-4, gt=0.0, description="Central-difference step per parameter")
    beta: float = Field(default=10.0, gt=0.0, description="Sharpness of the smoothed robustness")


@dataclass(frozen=True)
class AscentStep:
    iteration: int
    value: float
    accepted: bool


def finite_difference_gradient(objective: Callable[[np.ndarray], float], theta: np.ndarray, h: float) -> np.ndarray:
    grad = np.empty_like(theta)
    for i in range(theta.size):
        offset = np.zeros_like(theta)
        offset[i] = h
        grad[i] = (objective(theta + offset) - objective(theta - offset)) / (2.0 * h)
    return grad


def gradient_ascent(
    objective: Callable[[np.ndarray], float],
    theta0: np.ndarray,
    eta: float,
    steps: int,
    accept: Callable[[np.ndarray], bool] | None = None,
    fd_step: float = 1e-4,
) -> tuple[np.ndarray, list[AscentStep]]:
    """
    theta <- theta + eta * grad(objective) for up to `steps` steps.

    A step rejected by `accept` ends the run at the last accepted theta.
    """
    theta = np.array(theta0, dtype=float)
    history: list[AscentStep] = []
    if eta == 0:
        return theta, history
    for iteration in range(steps):
        candidate = theta + eta * finite_difference_gradient(objective, theta, fd_step)
        ok = accept is None or accept(candidate)
        history.append(AscentStep(iteration, objective(candidate), ok))
        if not ok:
            break
        theta = candidate
    return theta, history


def smoothed_energy(
    repair_states: np.ndarray,
    protected_states: np.ndarray,
    params: MlpParams,
    plant: BasePlant,
    formula: StlFormula,
    energy: EnergyConfig,
    beta: float,
) -> float:
    """Barrier energy with log-sum-exp robustness in place of the exact one."""

    def _smooth(states: np.ndarray) -> np.ndarray:
        trajectories = rollout_batch(plant, params, states, plant.horizon)
        return batch_robustness(formula, trajectories, plant.state_names, beta=beta)

    value = float(np.mean(_smooth(repair_states)))
    if protected_states.shape[0]:
        value += energy.lam * float(np.mean(log_barrier(_smooth(protected_states), energy.barrier_floor)))
    return value


@register_optimizer("grad")
class GradientAscentOptimizer(RepairOptimizer):
    name = "grad"

    def improve(
        self,
        repair_states: np.ndarray,
        protected_states: np.ndarray,
        params: MlpParams,
        plant: BasePlant,
        formula: StlFormula,
        oracle: RobustnessOracle,
        round_index: int,
        region_id: int,
    ) -> OptimizerResult:
        cfg = self.gradient or GradientConfig()
        theta0 = params.to_vector()

        def objective(theta: np.ndarray) -> float:
            candidate = params.with_vector(theta)
            return smoothed_energy(repair_states, protected_states, candidate, plant, formula, self.energy, cfg.beta)

        def keeps_protected(theta: np.ndarray) -> bool:
            robs = oracle(params.with_vector(theta), protected_states)
            return bool(np.all(robs >= 0))

        def exact(candidate: MlpParams) -> float:
            return energy_from_robustness(
                oracle(candidate, repair_states), oracle(candidate, protected_states), self.energy
            ).energy

        best, best_energy = params, exact(params)
        start_value = objective(theta0)
        records: list[IterationRecord] = []
        for eta in cfg.etas:
            theta, history = gradient_ascent(objective, theta0, eta, cfg.steps, keeps_protected, cfg.fd_step)
            candidate = params.with_vector(theta)
            candidate_energy = exact(candidate)
            robs = oracle(candidate, protected_states)
            rho_min = float(np.min(robs)) if robs.size else settings.TOP_ROBUSTNESS
            offset = len(records)
            previous = [start_value] + [step.value for step in history[:-1]]
            records.extend(
                IterationRecord(
                    round=round_index,
                    region=region_id,
                    iteration=offset + step.iteration,
                    tau=eta,
                    energy=step.value,
                    delta=step.value - before,
                    accepted=step.accepted,
                    safeguard_pass=step.accepted,
                    rho_min=rho_min,
                )
                for step, before in zip(history, previous, strict=True)
            )
            logger.debug(f"Gradient ascent eta={eta}: {len(history)} steps, exact energy {candidate_energy:.6g}")
            if candidate_energy > best_energy:
                best, best_energy = candidate, candidate_energy

        changed = not np.array_equal(best.to_vector(), theta0)
        return OptimizerResult(best, changed, records)
