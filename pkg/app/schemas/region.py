from typing import Literal

from pydantic import BaseModel, Field

SNAPSHOT_FORMAT_VERSION = 1


class RegionRecord(BaseModel):
    """Bounds, verdict and samples of one region."""

    id: int
    lower: list[float] = Field(description="Lower bounds over the free initial coordinates")
    upper: list[float] = Field(description="Upper bounds over the free initial coordinates")
    verified: bool = Field(description="Verifier result")
    region_class: Literal["verified", "unknown", "failed"] = Field(description="Classification label")
    min_rob: float = Field(description="Minimum sampled robustness")
    samples: list[list[float]] = Field(default_factory=list, description="Sampled free initial coordinates")
    robustness: list[float] = Field(default_factory=list, description="Robustness of each sample")


class PartitionSnapshot(BaseModel):
    """Classification of every region at one point of a run."""

    version: Literal[1] = Field(default=SNAPSHOT_FORMAT_VERSION, description="File format version")
    plant: str
    phase: Literal["before", "after"]
    free_names: list[str] = Field(description="Names of the free initial coordinates")
    regions: list[RegionRecord]
