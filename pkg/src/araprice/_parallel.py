"""Deterministic work splitting for grid evaluations.

All randomness is drawn up front by the engines; only the deterministic
grid evaluation is split here.  Each worker owns a pre-assigned
contiguous slice and writes results into pre-allocated arrays, so the
output is bit-identical for any worker count or scheduling order.
"""

from __future__ import annotations

import os
from concurrent.futures import ThreadPoolExecutor
from typing import Callable

__all__ = ["resolve_workers", "run_sliced"]


def resolve_workers(requested: int | None = None) -> int:
    """Worker count from the argument, else PRICE_WORKERS, else 1."""
    if requested is not None:
        return max(1, int(requested))
    env = os.environ.get("PRICE_WORKERS")
    if env:
        try:
            return max(1, int(env))
        except ValueError:
            return 1
    return 1


def run_sliced(fn: Callable[[slice], None], total: int, workers: int) -> None:
    """Call ``fn`` on contiguous slices covering range(total).

    ``fn`` must write its results into shared pre-allocated storage;
    slices never overlap, so no synchronization is needed.
    """
    workers = min(max(1, workers), max(1, total))
    if workers == 1:
        fn(slice(0, total))
        return
    bounds = [round(i * total / workers) for i in range(workers + 1)]
    slices = [
        slice(bounds[i], bounds[i + 1])
        for i in range(workers)
        if bounds[i + 1] > bounds[i]
    ]
    with ThreadPoolExecutor(max_workers=len(slices)) as pool:
        for future in [pool.submit(fn, s) for s in slices]:
            future.result()
