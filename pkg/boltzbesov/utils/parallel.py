"""Thread-pool helpers for the embarrassingly parallel sweeps.

numpy and scipy release the GIL inside their kernels, so a thread pool is
enough to overlap per-chunk work.
"""

from collections.abc import Callable, Iterable, Iterator
from concurrent.futures import ThreadPoolExecutor
from typing import TypeVar

T = TypeVar("T")
R = TypeVar("R")


def parallel_map(fn: Callable[[T], R], items: Iterable[T], threads: int = 1) -> list[R]:
    """Apply ``fn`` to every item, preserving order.

    Args:
        fn: Pure function of one item
        items: Work items
        threads: Worker count (1 runs inline)

    Returns:
        Results in input order
    """
    if threads <= 1:
        return [fn(item) for item in items]
    with ThreadPoolExecutor(max_workers=threads) as pool:
        return list(pool.map(fn, items))


def chunk_ranges(total: int, size: int) -> Iterator[slice]:
    """Yield contiguous slices of at most ``size`` covering ``range(total)``."""
    size = max(1, size)
    for start in range(0, total, size):
        yield slice(start, min(start + size, total))
