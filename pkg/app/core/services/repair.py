"""
Incremental repair driver.

Verifies every region, samples them, and classifies them as protected, unknown or
failed. Failed regions are then repaired one at a time, head of the sorted queue
first: the optimizer improves the head's failing samples while (for protecting
optimizers) every protected sample keeps non-negative robustness. After each move
all failed regions are re-evaluated and fully successful ones join the protected
set. A final verification pass measures what was broken and what was repaired.
"""

import copy
import time
from dataclasses import dataclass, field

import numpy as np
from loguru import logger
from pydantic import BaseModel, ConfigDict, Field

from app.core.controller import MlpParams
from app.core.energy import EnergyConfig, RobustnessOracle
from app.core.plants.base import BasePlant
from app.core.region import PartitionState, Region, classify, sample_region
from app.core.registry import get_optimizer_class
from app.core.services.annealing import AnnealConfig
from app.core.services.gradient import GradientConfig
from app.core.stl import StlFormula
from app.core.verifier.verify import check_template, verify_region
from app.schemas.report import (
    ClassCounts,
    IterationRecord,
    MinRobStats,
    PhaseTimings,
    RepairReport,
    ReportRow,
    RoundRecord,
    VerificationRecord,
)
from app.workers.pool import WorkPool


class RepairSettings(BaseModel):
    """Knobs of the repair driver itself."""

    model_config = ConfigDict(frozen=True, extra="forbid")

    K: int = Field(default=100, ge=1, description="Samples per region")
    seed: int = Field(default=0, ge=0, description="Sampling seed")
    refine_depth: int = Field(default=2, ge=0, description="Verifier refinement depth")
    epsilon: float = Field(default=0.0, ge=0.0, description="Verifier safety margin")
    max_rounds: int | None = Field(default=None, ge=1, description="Global budget of main-loop rounds")
    max_attempts: int = Field(default=3, ge=1, description="Rounds a region may head the queue before quarantine")
    record_timing: bool = Field(default=True, description="Record wall-clock fields in the report and logs")


@dataclass
class RepairOutcome:
    params: MlpParams
    before: PartitionState
    after: PartitionState | None
    report: RepairReport
    iterations: list[IterationRecord] = field(default_factory=list)
    verification: list[VerificationRecord] = field(default_factory=list)


def min_rob_stats(robustness: np.ndarray, ids: list[int]) -> MinRobStats | None:
    if not ids:
        return None
    minima = robustness[sorted(ids)].min(axis=1)
    return MinRobStats(mean=float(np.mean(minima)), std=float(np.std(minima)), count=len(ids))


def report_row(label: str, state: PartitionState, broken: int | None = None, repaired: int | None = None) -> ReportRow:
    return ReportRow(
        label=label,
        counts=ClassCounts(
            verified=len(state.protected),
            unknown=len(state.unknown),
            failed=len(state.failed),
        ),
        broken=broken,
        repaired=repaired,
        min_rob_failed=min_rob_stats(state.robustness, state.failed),
        min_rob_safe=min_rob_stats(state.robustness, state.protected + state.unknown),
        min_rob_overall=min_rob_stats(state.robustness, [r.id for r in state.regions]),
    )


class RepairService:
    """Runs verification, classification and (optionally) repair for one plant and task."""

    def __init__(
        self,
        plant: BasePlant,
        formula: StlFormula,
        settings: RepairSettings,
        energy: EnergyConfig,
        anneal: AnnealConfig,
        gradient: GradientConfig | None = None,
        pool: WorkPool | None = None,
    ) -> None:
        self.plant = plant
        self.formula = formula
        self.settings = settings
        self.energy = energy
        self.anneal = anneal
        self.gradient = gradient
        self.pool = pool
        self.oracle = RobustnessOracle(plant, formula, pool)

    def _clock(self) -> float | None:
        return time.perf_counter() if self.settings.record_timing else None

    def verify_all(
        self,
        params: MlpParams,
        regions: list[Region],
        phase: str,
    ) -> tuple[np.ndarray, list[VerificationRecord]]:
        """Verify every region; results are joined in region order."""
        check_template(self.formula, self.plant.state_names)

        def _verify(region: Region) -> tuple[bool, float | None]:
            start = time.perf_counter()
            verified = verify_region(
                self.plant, self.formula, params, region, self.settings.refine_depth, self.settings.epsilon
            )
            return verified, (time.perf_counter() - start) if self.settings.record_timing else None

        results = self.pool.map(_verify, regions) if self.pool else [_verify(r) for r in regions]
        flags = np.array([verified for verified, _ in results], dtype=bool)
        records = [
            VerificationRecord(
                phase=phase,
                region=region.id,
                verified=verified,
                refine_depth=self.settings.refine_depth,
                seconds=seconds,
            )
            for region, (verified, seconds) in zip(regions, results, strict=True)
        ]
        logger.info(f"Verification ({phase}): {int(flags.sum())}/{len(regions)} regions verified")
        return flags, records

    def sample_all(self, regions: list[Region]) -> np.ndarray:
        """(M, K, state_dim) samples, one independent stream per region."""
        if not regions:
            return np.empty((0, self.settings.K, self.plant.state_dim))
        return np.stack(
            [self.plant.embed(sample_region(r, self.settings.K, self.settings.seed)) for r in regions],
            axis=0,
        )

    def evaluate(self, params: MlpParams, samples: np.ndarray) -> np.ndarray:
        """Robustness of (n, K, state_dim) samples as an (n, K) array."""
        if samples.shape[0] == 0:
            return np.empty((0, self.settings.K))
        flat = samples.reshape(-1, self.plant.state_dim)
        return np.array(self.oracle(params, flat)).reshape(samples.shape[:2])

    def run(self, params: MlpParams, regions: list[Region], method: str | None) -> RepairOutcome:
        """
        Verify, classify and, unless method is None, repair.

        Args:
            params: Initial controller
            regions: Partition of the initial-state space
            method: Registered optimizer name ("isar", "plain-sa", "grad"), or None
                to stop after the initial classification

        Returns:
            Final controller, classifications before and after, report and logs

        Raises:
            VerifierInconsistencyError: If a verified region has a failing sample
            KeyError: If the method is not registered
        """
        optimizer = (
            get_optimizer_class(method)(self.energy, self.anneal, self.gradient) if method is not None else None
        )
        started = self._clock()
        flags, verification = self.verify_all(params, regions, "before")
        verified_at = self._clock()
        samples = self.sample_all(regions)
        state = classify(regions, flags, self.evaluate(params, samples), samples)
        before = copy.deepcopy(state)
        sampled_at = self._clock()

        report = RepairReport(
            plant=self.plant.name,
            formula=str(self.formula),
            method=method or "verify-only",
            seed=self.settings.seed,
            regions_total=len(regions),
            initially_verified=len(before.protected),
            initially_failed=len(before.failed),
            before=report_row("Before repair", before),
        )
        if optimizer is None:
            if started is not None:
                report.timings = PhaseTimings(
                    verify_before=verified_at - started, sampling=sampled_at - verified_at, repair=0.0, verify_after=0.0
                )
            return RepairOutcome(params, before, None, report, [], verification)

        iterations: list[IterationRecord] = []
        rounds: list[RoundRecord] = []
        quarantined: set[int] = set()
        attempts: dict[int, int] = {}
        round_index = 0
        logger.info(f"Repairing {len(state.failed)} failed regions with {method}")
        while True:
            active = [i for i in state.failed if i not in quarantined]
            if not active:
                break
            if self.settings.max_rounds is not None and round_index >= self.settings.max_rounds:
                logger.info(f"Stopping after the round budget of {self.settings.max_rounds}")
                break
            head = active[0]
            repair_states = state.samples[head][state.robustness[head] < 0]
            protected_states = (
                state.protected_samples() if optimizer.protects else np.empty((0, self.plant.state_dim))
            )
            result = optimizer.improve(
                repair_states, protected_states, params, self.plant, self.formula, self.oracle, round_index, head
            )
            iterations.extend(result.records)
            attempts[head] = attempts.get(head, 0) + 1

            promoted: list[int] = []
            if result.changed:
                params = result.params
                failed_ids = list(state.failed)
                state.robustness[failed_ids] = self.evaluate(params, state.samples[failed_ids])
                promoted = state.promote(failed_ids)
                state.sort_failed()
            if not result.changed or (head in state.failed and attempts[head] >= self.settings.max_attempts):
                quarantined.add(head)

            now = self._clock()
            rounds.append(
                RoundRecord(
                    round=round_index,
                    region=head,
                    changed=result.changed,
                    promoted=promoted,
                    failed_remaining=len(state.failed),
                    quarantined=len(quarantined & set(state.failed)),
                    seconds=(now - sampled_at) if now is not None else None,
                )
            )
            logger.info(
                f"Round {round_index}: region {head} changed={result.changed}, "
                f"promoted {promoted}, {len(state.failed)} failed remaining",
            )
            round_index += 1
        repaired_at = self._clock()

        flags_after, verification_after = self.verify_all(params, regions, "after")
        verification.extend(verification_after)
        after = classify(regions, flags_after, self.evaluate(params, samples), samples)
        finished = self._clock()

        broken_ids = [i for i in before.protected if not flags_after[i]]
        repaired_ids = [i for i in before.failed if i not in after.failed]
        flagged_ids = sorted(i for i in state.protected if not flags_after[i])
        if flagged_ids:
            logger.warning(f"Protected regions failing final verification: {flagged_ids}")

        report.after = report_row(method, after, broken=len(broken_ids), repaired=len(repaired_ids))
        report.broken_ids = sorted(broken_ids)
        report.repaired_ids = sorted(repaired_ids)
        report.flagged_ids = flagged_ids
        report.rounds = rounds
        report.robustness_evaluations = self.oracle.evaluations
        if started is not None:
            report.timings = PhaseTimings(
                verify_before=verified_at - started,
                sampling=sampled_at - verified_at,
                repair=repaired_at - sampled_at,
                verify_after=finished - repaired_at,
            )
        logger.info(f"Repair finished: {len(repaired_ids)} repaired, {len(broken_ids)} broken")
        return RepairOutcome(params, before, after, report, iterations, verification)


def isar(
    params: MlpParams,
    regions: list[Region],
    plant: BasePlant,
    formula: StlFormula,
    settings: RepairSettings,
    energy: EnergyConfig,
    anneal: AnnealConfig,
    pool: WorkPool | None = None,
) -> RepairOutcome:
    """Incremental safeguarded-annealing repair."""
    return RepairService(plant, formula, settings, energy, anneal, pool=pool).run(params, regions, "isar")


def baseline_plain_annealing(
    params: MlpParams,
    regions: list[Region],
    plant: BasePlant,
    formula: StlFormula,
    settings: RepairSettings,
    energy: EnergyConfig,
    anneal: AnnealConfig,
    pool: WorkPool | None = None,
) -> RepairOutcome:
    """Same driver without barrier, protected samples or safeguard."""
    return RepairService(plant, formula, settings, energy, anneal, pool=pool).run(params, regions, "plain-sa")


def baseline_gradient_ascent(
    params: MlpParams,
    regions: list[Region],
    plant: BasePlant,
    formula: StlFormula,
    settings: RepairSettings,
    energy: EnergyConfig,
    anneal: AnnealConfig,
    gradient: GradientConfig | None = None,
    pool: WorkPool | None = None,
) -> RepairOutcome:
    """Same driver with finite-difference gradient ascent as the inner step."""
    service = RepairService(plant, formula, settings, energy, anneal, gradient or GradientConfig(), pool)
    return service.run(params, regions, "grad")
