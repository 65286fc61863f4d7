"""Fixed-size work pool with order-preserving reduction.

Tasks must be pure functions of their arguments; results are returned in
submission order, so the caller's output never depends on the worker
count or scheduling.
"""

from __future__ import annotations

from concurrent.futures import ThreadPoolExecutor
from typing import Callable, Iterable, Sequence


def run_ordered(fn: Callable, items: Sequence, threads: int = 1) -> list:
    if threads <= 1 or len(items) <= 1:
        return [fn(x) for x in items]
    with ThreadPoolExecutor(max_workers=threads) as pool:
        return list(pool.map(fn, items))
