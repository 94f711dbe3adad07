"""Ordered concurrent execution of independent solver runs.

The worker count comes from the FRONFIX_THREADS environment variable;
0 or unset means one worker per CPU. Results always come back in input
order, so multi-run modes stay deterministic.
"""

from __future__ import annotations

import os
from concurrent.futures import ThreadPoolExecutor
from typing import Callable, Sequence, TypeVar

T = TypeVar("T")
R = TypeVar("R")

__all__ = ["worker_count", "map_ordered"]


def worker_count() -> int:
    raw = os.environ.get("FRONFIX_THREADS", "0")
    try:
        n = int(raw)
    except ValueError:
        n = 0
    if n <= 0:
        n = os.cpu_count() or 1
    return n


def map_ordered(fn: Callable[[T], R], items: Sequence[T]) -> list[R]:
    if len(items) <= 1 or worker_count() == 1:
        return [fn(item) for item in items]
    with ThreadPoolExecutor(max_workers=min(worker_count(), len(items))) as pool:
        return list(pool.map(fn, items))
