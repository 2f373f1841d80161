"""Order-preserving thread map used by the batch pipelines."""

from __future__ import annotations

import os
from concurrent.futures import ThreadPoolExecutor
from itertools import islice
from typing import Callable, Iterable, Iterator, TypeVar

T = TypeVar("T")
R = TypeVar("R")

THREADS_ENV = "SIGSCORE_THREADS"


def resolve_threads(threads: int | None = None) -> int:
    """``None`` reads ``SIGSCORE_THREADS``; 0 means one worker per CPU."""
    if threads is None:
        threads = int(os.environ.get(THREADS_ENV, "0") or 0)
    if threads < 0:
        raise ValueError(f"thread count must be >= 0, got {threads}")
    return threads or (os.cpu_count() or 1)


def ordered_map(fn: Callable[[T], R], items: Iterable[T],
                threads: int | None = None) -> Iterator[R]:
    """Lazily yield ``fn(item)`` in input order.

    Work is submitted in bounded chunks so large per-item results never pile
    up in memory; completion order never leaks into the output order.
    """
    n = resolve_threads(threads)
    it = iter(items)
    if n == 1:
        yield from map(fn, it)
        return
    with ThreadPoolExecutor(max_workers=n) as pool:
        while True:
            chunk = list(islice(it, 2 * n))
            if not chunk:
                return
            yield from pool.map(fn, chunk)
