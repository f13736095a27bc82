"""Order-preserving parallel map used by the evaluation harness and CLI."""

from __future__ import annotations

import os
from concurrent.futures import ThreadPoolExecutor
from typing import Callable, Iterable, Sequence, TypeVar

T = TypeVar("T")
R = TypeVar("R")


def available_parallelism() -> int:
    return os.cpu_count() or 1


def ordered_map(fn: Callable[[T], R], items: Iterable[T], jobs: int | None = None) -> list[R]:
    """Map preserving input order; jobs<=1 runs inline."""
    seq: Sequence[T] = list(items)
    if jobs is None:
        jobs = 1
    if jobs <= 1 or len(seq) <= 1:
        return [fn(item) for item in seq]
    with ThreadPoolExecutor(max_workers=min(jobs, len(seq))) as pool:
        return list(pool.map(fn, seq))
