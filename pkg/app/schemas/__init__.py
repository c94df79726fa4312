"""Pydantic schemas for configuration files and run artifacts."""

from app.schemas.controller import ControllerDocument, LayerDocument
from app.schemas.region import PartitionSnapshot, RegionRecord
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

__all__ = [
    "ClassCounts",
    "ControllerDocument",
    "IterationRecord",
    "LayerDocument",
    "MinRobStats",
    "PartitionSnapshot",
    "PhaseTimings",
    "RegionRecord",
    "RepairReport",
    "ReportRow",
    "RoundRecord",
    "VerificationRecord",
]
