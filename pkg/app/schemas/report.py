"""
Schemas for run artifacts: iteration and verification logs and the repair report.
"""

from typing import Literal

from pydantic import BaseModel, Field

REPORT_FORMAT_VERSION = 1


class IterationRecord(BaseModel):
    """One annealing (or gradient) iteration of the repair loop."""

    round: int = Field(description="Main-loop round of the repair driver")
    region: int = Field(description="Region under repair")
    iteration: int = Field(description="Iteration within the round")
    tau: float = Field(description="Temperature when the move was judged")
    energy: float = Field(description="Energy of the proposed parameters")
    delta: float = Field(description="Energy change relative to the current parameters")
    accepted: bool = Field(description="Whether the proposal became the current parameters")
    safeguard_pass: bool = Field(description="Whether protected robustness stayed non-negative")
    rho_min: float = Field(description="Minimum protected robustness of the proposal")


class VerificationRecord(BaseModel):
    """Verifier outcome for one region."""

    phase: Literal["before", "after"] = Field(description="Verification before or after repair")
    region: int = Field(description="Region id")
    verified: bool = Field(description="Verifier result")
    refine_depth: int = Field(description="Uniform refinement depth used")
    seconds: float | None = Field(default=None, description="Wall time, omitted when timing is off")


class ClassCounts(BaseModel):
    verified: int = Field(description="Regions that pass verification")
    unknown: int = Field(description="Regions neither verified nor failing on samples")
    failed: int = Field(description="Regions with a failing sample")

    @property
    def total(self) -> int:
        return self.verified + self.unknown + self.failed


class MinRobStats(BaseModel):
    """Mean and population standard deviation of per-region minimum sampled robustness."""

    mean: float
    std: float
    count: int


class ReportRow(BaseModel):
    """One row of the results table."""

    label: str = Field(description="Row label, e.g. 'Before repair' or the method name")
    counts: ClassCounts
    broken: int | None = Field(default=None, description="Initially verified regions that no longer verify")
    repaired: int | None = Field(default=None, description="Initially failed regions with no failing sample")
    min_rob_failed: MinRobStats | None = None
    min_rob_safe: MinRobStats | None = None
    min_rob_overall: MinRobStats | None = None


class RoundRecord(BaseModel):
    """Outcome of one main-loop round of the repair driver."""

    round: int
    region: int = Field(description="Head region repaired this round")
    changed: bool = Field(description="Whether the optimizer moved the parameters")
    promoted: list[int] = Field(default_factory=list, description="Regions promoted to protected")
    failed_remaining: int = Field(description="Failed regions after the round")
    quarantined: int = Field(description="Failed regions set aside after a stall")
    seconds: float | None = Field(default=None, description="Elapsed repair time at the end of the round")


class PhaseTimings(BaseModel):
    verify_before: float
    sampling: float
    repair: float
    verify_after: float


class RepairReport(BaseModel):
    """Structured run report, one row per phase."""

    version: Literal[1] = Field(default=REPORT_FORMAT_VERSION, description="File format version")
    plant: str
    formula: str
    method: str
    seed: int
    regions_total: int
    initially_verified: int
    initially_failed: int
    before: ReportRow
    after: ReportRow | None = Field(default=None, description="Absent for verification-only runs")
    broken_ids: list[int] = Field(default_factory=list)
    repaired_ids: list[int] = Field(default_factory=list)
    flagged_ids: list[int] = Field(
        default_factory=list,
        description="Protected regions (verified or promoted) that fail final verification",
    )
    rounds: list[RoundRecord] = Field(default_factory=list)
    robustness_evaluations: int = Field(default=0, description="Rollouts performed during repair")
    timings: PhaseTimings | None = None
