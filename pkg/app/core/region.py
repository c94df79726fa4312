"""
Initial-state partition, per-region sampling and the three-way classification.

Regions are axis-aligned cells over the plant's free initial coordinates, ordered
lexicographically by grid index; a region's id is its position in that order.
"""

from __future__ import annotations

import itertools
import math
from collections.abc import Iterable, Sequence
from dataclasses import dataclass, field
from enum import StrEnum

import numpy as np
from loguru import logger

from app.core.exceptions import PartitionError, VerifierInconsistencyError

STEP_TOLERANCE = 1e-9


class RegionClass(StrEnum):
    VERIFIED = "verified"
    UNKNOWN = "unknown"
    FAILED = "failed"


@dataclass(frozen=True)
class Region:
    id: int
    lower: tuple[float, ...]
    upper: tuple[float, ...]

    def __post_init__(self) -> None:
        if len(self.lower) != len(self.upper) or not all(lo < hi for lo, hi in zip(self.lower, self.upper, strict=True)):
            raise PartitionError(
                f"Region {self.id} bounds must satisfy lower < upper",
                {"lower": list(self.lower), "upper": list(self.upper)},
            )

    @property
    def dim(self) -> int:
        return len(self.lower)

    @property
    def volume(self) -> float:
        return math.prod(hi - lo for lo, hi in zip(self.lower, self.upper, strict=True))

    def contains(self, point: Sequence[float]) -> bool:
        return all(lo <= p <= hi for lo, p, hi in zip(self.lower, point, self.upper, strict=True))

    def split(self, depth: int) -> tuple[np.ndarray, np.ndarray]:
        """Uniform 2^depth-per-dimension sub-boxes as (n, dim) lower and upper arrays."""
        parts = 2**depth
        edges = [np.linspace(lo, hi, parts + 1) for lo, hi in zip(self.lower, self.upper, strict=True)]
        cells = list(itertools.product(range(parts), repeat=self.dim))
        lower = np.array([[edges[d][i] for d, i in enumerate(cell)] for cell in cells])
        upper = np.array([[edges[d][i + 1] for d, i in enumerate(cell)] for cell in cells])
        return lower, upper


def partition(lower: Sequence[float], upper: Sequence[float], steps: Sequence[float]) -> list[Region]:
    """
    Grid the box [lower, upper] into rectangular cells.

    A step that does not divide its extent (within 1e-9 relative) leaves a shorter
    last cell that ends on the boundary.

    Raises:
        PartitionError: On a non-positive step, an empty box or mismatched lengths
    """
    if not (len(lower) == len(upper) == len(steps)) or len(lower) == 0:
        raise PartitionError("Partition bounds and steps must have the same non-zero length")
    axes: list[list[tuple[float, float]]] = []
    for dim, (lo, hi, step) in enumerate(zip(lower, upper, steps, strict=True)):
        if not step > 0:
            raise PartitionError(f"Partition step must be positive, got {step}", {"dim": dim})
        if not hi > lo:
            raise PartitionError(f"Partition box is empty in dimension {dim}: [{lo}, {hi}]", {"dim": dim})
        count = math.ceil((hi - lo) / step - STEP_TOLERANCE)
        axes.append([(lo + i * step, min(lo + (i + 1) * step, hi) if i < count - 1 else hi) for i in range(count)])

    regions = [
        Region(index, tuple(c[0] for c in cell), tuple(c[1] for c in cell))
        for index, cell in enumerate(itertools.product(*axes))
    ]
    logger.debug(f"Partitioned box into {len(regions)} regions ({' x '.join(str(len(a)) for a in axes)})")
    return regions


def locate(regions: Sequence[Region], point: Sequence[float]) -> int:
    """
    Id of the region containing point; a point on a shared face belongs to the lower id.

    Raises:
        PartitionError: If the point lies outside every region
    """
    lower = np.array([r.lower for r in regions])
    upper = np.array([r.upper for r in regions])
    point = np.asarray(point, dtype=float)
    hits = np.flatnonzero(np.all((point >= lower) & (point <= upper), axis=1))
    if hits.size == 0:
        raise PartitionError(f"Point {point.tolist()} lies outside the partition")
    return regions[int(hits[0])].id


def region_rng(seed: int, region_id: int) -> np.random.Generator:
    """Counter-based generator keyed by (seed, region id)."""
    return np.random.Generator(np.random.Philox(np.random.SeedSequence([seed, region_id])))


def sample_region(region: Region, K: int, seed: int) -> np.ndarray:
    """
    K i.i.d. uniform points strictly inside the region.

    Returns:
        (K, region.dim) array of free initial coordinates
    """
    if K < 1:
        raise PartitionError(f"Sample count must be at least 1, got {K}", {"K": K})
    lower = np.array(region.lower)
    upper = np.array(region.upper)
    u = region_rng(seed, region.id).random((K, region.dim))
    points = lower + u * (upper - lower)
    return np.clip(points, np.nextafter(lower, upper), np.nextafter(upper, lower))


@dataclass
class PartitionState:
    """
    Per-region samples, robustness and verification flags, with the set assignment.

    protected holds verified regions plus regions promoted during repair; failed is
    kept sorted by decreasing robustness sum (ties by id); unknown is the rest.
    """

    regions: list[Region]
    samples: np.ndarray
    robustness: np.ndarray
    flags: np.ndarray
    protected: list[int] = field(default_factory=list)
    unknown: list[int] = field(default_factory=list)
    failed: list[int] = field(default_factory=list)

    @property
    def K(self) -> int:
        return self.robustness.shape[1]

    def region_class(self, region_id: int) -> RegionClass:
        if region_id in self.failed:
            return RegionClass.FAILED
        if self.flags[region_id]:
            return RegionClass.VERIFIED
        return RegionClass.UNKNOWN

    def sort_failed(self) -> None:
        sums = self.robustness.sum(axis=1)
        self.failed.sort(key=lambda i: (-sums[i], i))

    def protected_samples(self) -> np.ndarray:
        if not self.protected:
            return np.empty((0, self.samples.shape[-1]))
        return self.samples[sorted(self.protected)].reshape(-1, self.samples.shape[-1])

    def promote(self, region_ids: Iterable[int]) -> list[int]:
        """Move fully successful failed regions into the protected set."""
        promoted = [i for i in region_ids if i in self.failed and bool(np.all(self.robustness[i] >= 0))]
        for i in promoted:
            self.failed.remove(i)
            self.protected.append(i)
        return promoted

    def check_trichotomy(self) -> None:
        seen = set(self.protected) | set(self.unknown) | set(self.failed)
        total = len(self.protected) + len(self.unknown) + len(self.failed)
        if total != len(self.regions) or seen != {r.id for r in self.regions}:
            raise PartitionError("Region sets are not a partition of the regions")

    def counts(self) -> tuple[int, int, int]:
        return len(self.protected), len(self.unknown), len(self.failed)


def classify(
    regions: list[Region],
    flags: np.ndarray,
    robustness: np.ndarray,
    samples: np.ndarray,
) -> PartitionState:
    """
    Assign every region to protected, unknown or failed.

    Raises:
        VerifierInconsistencyError: If a verified region has a negative sample
    """
    flags = np.asarray(flags, dtype=bool)
    robustness = np.asarray(robustness, dtype=float)
    if flags.shape != (len(regions),) or robustness.shape[0] != len(regions):
        raise PartitionError("Flags and robustness must cover every region")

    failing = np.any(robustness < 0, axis=1)
    inconsistent = np.flatnonzero(flags & failing)
    if inconsistent.size:
        ids = inconsistent.tolist()
        raise VerifierInconsistencyError(
            f"Verified regions contain failing samples: {ids[:10]}",
            {"regions": ids},
        )

    state = PartitionState(
        regions=regions,
        samples=samples,
        robustness=robustness,
        flags=flags,
        protected=[int(i) for i in np.flatnonzero(flags)],
        unknown=[int(i) for i in np.flatnonzero(~flags & ~failing)],
        failed=[int(i) for i in np.flatnonzero(failing)],
    )
    state.sort_failed()
    state.check_trichotomy()
    logger.info(f"Classified {len(regions)} regions: {':'.join(str(c) for c in state.counts())} (protected:unknown:failed)")
    return state
