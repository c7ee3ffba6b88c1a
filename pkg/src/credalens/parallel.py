"""Order-preserving thread pool helper.

Work items must be independent and seeded individually; results are
collected by index, so output never depends on scheduling or pool size.
"""

from __future__ import annotations

import os
from concurrent.futures import ThreadPoolExecutor
from typing import Callable, Iterable, Sequence, TypeVar

T = TypeVar("T")
R = TypeVar("R")

_ENV_VAR = "CREDALENS_THREADS"


def resolve_threads(requested: int | None = None) -> int:
    """Thread count: explicit argument, else CREDALENS_THREADS, else cpu count."""
    if requested is not None and requested >= 1:
        return requested
    env = os.environ.get(_ENV_VAR)
    if env:
        try:
            value = int(env)
            if value >= 1:
                return value
        except ValueError:
            pass
    return os.cpu_count() or 1


def thread_map(fn: Callable[[T], R], items: Sequence[T] | Iterable[T], threads: int | None = None) -> list[R]:
    """Apply fn to each item, preserving input order in the result list."""
    items = list(items)
    n = resolve_threads(threads)
    if n <= 1 or len(items) <= 1:
        return [fn(item) for item in items]
    with ThreadPoolExecutor(max_workers=min(n, len(items))) as pool:
        return list(pool.map(fn, items))
