"""Deterministic parallel map over an index set.

Results are collected by position, so the output never depends on
completion order; one worker degrades to a plain loop.  Thread workers
are enough here because the heavy lifting happens inside LAPACK calls
that release the GIL.
"""

from __future__ import annotations

from concurrent.futures import ThreadPoolExecutor


def parallel_map(func, items, threads: int = 1) -> list:
    if threads <= 1 or len(items) <= 1:
        return [func(x) for x in items]
    with ThreadPoolExecutor(max_workers=threads) as pool:
        return list(pool.map(func, items))
