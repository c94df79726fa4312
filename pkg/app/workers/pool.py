"""
Thread pool with deterministic joins.

Work is cut into chunks of a fixed size (settings.CHUNK_SIZE), independent of the
thread count, and results are returned in submission order, so any reduction over
them is bit-identical whether one thread or many did the work.
"""

from collections.abc import Callable, Iterable, Sequence
from concurrent.futures import ThreadPoolExecutor
from types import TracebackType
from typing import TypeVar

from loguru import logger

from app.config import settings

T = TypeVar("T")
R = TypeVar("R")


class WorkPool:
    """Order-preserving map over a ThreadPoolExecutor; serial when threads == 1."""

    def __init__(self, threads: int | None = None) -> None:
        self.threads = max(1, threads if threads is not None else settings.THREADS)
        self._executor: ThreadPoolExecutor | None = None

    def __enter__(self) -> "WorkPool":
        if self.threads > 1:
            self._executor = ThreadPoolExecutor(max_workers=self.threads, thread_name_prefix="isar")
            logger.debug(f"Started work pool with {self.threads} threads")
        return self

    def __exit__(
        self,
        exc_type: type[BaseException] | None,
        exc_val: BaseException | None,
        exc_tb: TracebackType | None,
    ) -> None:
        self.close()

    def close(self) -> None:
        if self._executor is not None:
            self._executor.shutdown(wait=True)
            self._executor = None

    def map(self, fn: Callable[[T], R], items: Iterable[T]) -> list[R]:
        """Apply fn to every item; results keep the input order."""
        items = list(items)
        if self._executor is None or len(items) <= 1:
            return [fn(item) for item in items]
        return list(self._executor.map(fn, items))


def chunk_slices(count: int, chunk_size: int | None = None) -> list[slice]:
    """Fixed-size slices covering range(count)."""
    size = chunk_size or settings.CHUNK_SIZE
    return [slice(start, min(start + size, count)) for start in range(0, count, size)]


def map_chunks(
    fn: Callable[[Sequence[T]], R],
    items: Sequence[T],
    pool: WorkPool | None = None,
    chunk_size: int | None = None,
) -> list[R]:
    """Run fn over fixed-size chunks of items, through the pool when one is given."""
    chunks = [items[s] for s in chunk_slices(len(items), chunk_size)]
    if pool is None:
        return [fn(chunk) for chunk in chunks]
    return pool.map(fn, chunks)
