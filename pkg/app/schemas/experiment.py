"""
Experiment configuration document.

Every run-level knob lives in one YAML file so a run's provenance is a single
document; unknown keys are rejected.
"""

from typing import Literal

from pydantic import BaseModel, ConfigDict, Field, model_validator

Method = Literal["isar", "grad", "plain-sa", "verify-only"]


class SynthesisConfig(BaseModel):
    """Seed-controller synthesis, used when no controller file is given."""

    model_config = ConfigDict(extra="forbid")

    budget: int = Field(default=200, ge=1, description="Random-search candidates")
    grid_points: int = Field(default=5, ge=2, description="Grid resolution per free coordinate")
    step_size: float = Field(default=0.5, gt=0.0, description="Random-search perturbation scale")


class GradientSection(BaseModel):
    model_config = ConfigDict(extra="forbid")

    etas: list[float] = Field(default=[0.01, 0.001, 0.0001], min_length=1, description="Step sizes to try")
    steps: int = Field(default=10, ge=1, description="Ascent steps per step size")
    fd_step: float = Field(default=1e-4, gt=0.0, description="Finite-difference step")
    beta: float = Field(default=10.0, gt=0.0, description="Smoothing sharpness")

    @model_validator(mode="after")
    def check_etas(self) -> "GradientSection":
        if any(eta < 0 for eta in self.etas):
            raise ValueError("step sizes must be non-negative")
        return self


class ExperimentConfig(BaseModel):
    """Complete description of one verify, repair or baseline run."""

    model_config = ConfigDict(extra="forbid")

    plant: str = Field(description="Registered plant name, e.g. 'uuv' or 'mc'")
    formula: str | None = Field(default=None, description="Task formula; the plant's task when omitted")
    controller: str | None = Field(default=None, description="Controller weight file; synthesized when omitted")
    initial_lower: list[float] | None = Field(default=None, description="Lower corner of the initial box")
    initial_upper: list[float] | None = Field(default=None, description="Upper corner of the initial box")
    steps: list[float] | None = Field(default=None, description="Partition step per free coordinate")

    method: Method = Field(default="isar", description="Repair method or verify-only")
    K: int = Field(default=100, ge=1, description="Samples per region")
    lam: float = Field(default=1.0, ge=0.0, description="Barrier balance factor")
    barrier_floor: float = Field(default=-1000.0, lt=0.0, description="Log-barrier floor")
    sigma: float = Field(default=0.01, gt=0.0, description="Perturbation standard deviation")
    tau0: float = Field(default=1.0, gt=0.0, description="Initial temperature")
    alpha: float = Field(default=0.95, gt=0.0, lt=1.0, description="Cooling factor")
    max_iter: int = Field(default=100, ge=1, description="Annealing iterations per round")
    refine_depth: int = Field(default=2, ge=0, le=8, description="Verifier refinement depth")
    epsilon: float = Field(default=0.0, ge=0.0, description="Verifier safety margin")
    max_rounds: int | None = Field(default=None, ge=1, description="Global round budget")
    max_attempts: int = Field(default=3, ge=1, description="Rounds per region before quarantine")

    synthesis: SynthesisConfig = Field(default_factory=SynthesisConfig)
    gradient: GradientSection = Field(default_factory=GradientSection)

    seed: int = Field(default=0, ge=0, lt=2**64, description="Global seed")
    threads: int | None = Field(default=None, ge=1, description="Work-pool size; logical CPU count when omitted")
    output_dir: str | None = Field(default=None, description="Artifact directory")
    record_timing: bool = Field(default=True, description="Include wall-clock times in artifacts")

    @model_validator(mode="after")
    def check_box(self) -> "ExperimentConfig":
        given = [v for v in (self.initial_lower, self.initial_upper, self.steps) if v is not None]
        if given and len(given) != 3:
            raise ValueError("initial_lower, initial_upper and steps must be given together")
        if given:
            if not (len(self.initial_lower) == len(self.initial_upper) == len(self.steps)):
                raise ValueError("initial_lower, initial_upper and steps must have the same length")
            if any(lo >= hi for lo, hi in zip(self.initial_lower, self.initial_upper, strict=True)):
                raise ValueError("initial_lower must be below initial_upper in every coordinate")
            if any(step <= 0 for step in self.steps):
                raise ValueError("partition steps must be positive")
        return self
