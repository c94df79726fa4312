"""
Safeguarded simulated annealing and the repair-optimizer interface.

Each iteration perturbs every controller parameter with independent Gaussian
noise, scores the proposal with the barrier energy, and accepts it only if the
Metropolis criterion passes and (with the safeguard on) no protected sample's
robustness drops below zero. The temperature cools geometrically.
"""

from __future__ import annotations

import math
from abc import ABC, abstractmethod
from dataclasses import dataclass, field
from typing import TYPE_CHECKING, ClassVar

import numpy as np
from loguru import logger
from pydantic import BaseModel, ConfigDict, Field

from app.core.controller import MlpParams
from app.core.energy import EnergyConfig, EnergyEstimate, RobustnessOracle, energy_from_robustness
from app.core.plants.base import BasePlant
from app.core.registry import register_optimizer
from app.core.stl import StlFormula
from app.schemas.report import IterationRecord

if TYPE_CHECKING:
    from app.core.services.gradient import GradientConfig


class AnnealConfig(BaseModel):
    """Annealing schedule; sigma = 0 is allowed and never moves the parameters."""

    model_config = ConfigDict(frozen=True, extra="forbid")

    sigma: float = Field(default=0.01, ge=0.0, description="Perturbation standard deviation")
    tau0: float = Field(default=1.0, gt=0.0, description="Initial temperature")
    alpha: float = Field(default=0.95, gt=0.0, lt=1.0, description="Cooling factor")
    max_iter: int = Field(default=100, ge=1, description="Iterations per call")
    seed: int = Field(default=0, ge=0, description="Seed of the perturbation and acceptance draws")


@dataclass
class OptimizerResult:
    params: MlpParams
    changed: bool
    records: list[IterationRecord] = field(default_factory=list)


def metropolis_accept(delta: float, tau: float, rng: np.random.Generator) -> bool:
    """
    Metropolis criterion for maximization.

    Improvements (delta >= 0) are always accepted without consuming randomness;
    otherwise one uniform draw accepts with probability exp(delta / tau).
    """
    if not tau > 0:
        raise ValueError(f"Temperature must be positive, got {tau}")
    if delta >= 0:
        return True
    return bool(rng.random() < math.exp(delta / tau))


def annealing_rng(seed: int, round_index: int) -> np.random.Generator:
    return np.random.Generator(np.random.Philox(np.random.SeedSequence([seed, round_index])))


def safeguarded_sim_annealing(
    repair_states: np.ndarray,
    protected_states: np.ndarray,
    params: MlpParams,
    oracle: RobustnessOracle,
    energy: EnergyConfig,
    anneal: AnnealConfig,
    safeguard: bool = True,
    round_index: int = 0,
    region_id: int = -1,
) -> OptimizerResult:
    """
    Run exactly anneal.max_iter annealing iterations from params.

    Args:
        repair_states: Failing samples of the region under repair
        protected_states: Samples that must keep non-negative robustness
        params: Starting controller
        oracle: Robustness evaluator for the plant and task
        energy: Energy hyperparameters
        anneal: Annealing schedule
        safeguard: Reject proposals whose protected minimum robustness is negative
        round_index: Driver round, mixed into the random stream
        region_id: Region under repair, recorded in the iteration log

    Returns:
        The last accepted controller, whether it differs from params, and one
        record per iteration
    """
    rng = annealing_rng(anneal.seed, round_index)

    def _estimate(candidate: MlpParams) -> EnergyEstimate:
        return energy_from_robustness(oracle(candidate, repair_states), oracle(candidate, protected_states), energy)

    current = params
    current_estimate = _estimate(current)
    tau = anneal.tau0
    records: list[IterationRecord] = []
    for iteration in range(anneal.max_iter):
        theta = current.to_vector()
        candidate = current.with_vector(theta + rng.normal(0.0, anneal.sigma, size=theta.shape))
        estimate = _estimate(candidate)
        delta = estimate.energy - current_estimate.energy
        accepted = metropolis_accept(delta, tau, rng)
        safe = estimate.rho_min >= 0 or not safeguard
        records.append(
            IterationRecord(
                round=round_index,
                region=region_id,
                iteration=iteration,
                tau=tau,
                energy=estimate.energy,
                delta=delta,
                accepted=accepted and safe,
                safeguard_pass=estimate.rho_min >= 0,
                rho_min=estimate.rho_min,
            )
        )
        if accepted and safe:
            current, current_estimate = candidate, estimate
        tau *= anneal.alpha

    changed = not np.array_equal(current.to_vector(), params.to_vector())
    logger.debug(
        f"Round {round_index} region {region_id}: energy {current_estimate.energy:.6g}, "
        f"{sum(r.accepted for r in records)}/{len(records)} accepted, changed={changed}",
    )
    return OptimizerResult(current, changed, records)


class RepairOptimizer(ABC):
    """Inner step of the repair driver: improve one region without harming the protected set."""

    name: ClassVar[str]
    protects: ClassVar[bool] = True

    def __init__(
        self,
        energy: EnergyConfig,
        anneal: AnnealConfig,
        gradient: GradientConfig | None = None,
    ) -> None:
        self.energy = energy
        self.anneal = anneal
        self.gradient = gradient

    @abstractmethod
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
        pass


@register_optimizer("isar")
class SafeguardedAnnealer(RepairOptimizer):
    name = "isar"

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
        return safeguarded_sim_annealing(
            repair_states,
            protected_states,
            params,
            oracle,
            self.energy,
            self.anneal,
            safeguard=True,
            round_index=round_index,
            region_id=region_id,
        )


@register_optimizer("plain-sa")
class PlainAnnealer(RepairOptimizer):
    """Annealing on the mean robustness alone: no barrier, no protected samples, no safeguard."""

    name = "plain-sa"
    protects = False

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
        return safeguarded_sim_annealing(
            repair_states,
            np.empty((0, plant.state_dim)),
            params,
            oracle,
            self.energy.model_copy(update={"lam": 0.0}),
            self.anneal,
            safeguard=False,
            round_index=round_index,
            region_id=region_id,
        )
