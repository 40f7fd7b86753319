"""Deterministic fan-out over a process pool.

Work is split into contiguous index chunks and results are concatenated in
index order, so output never depends on the worker count.
"""
from __future__ import annotations

import os
from concurrent.futures import ProcessPoolExecutor

import numpy as np

ENV_WORKERS = "ERGODIC_GC_WORKERS"


def resolve_workers(flag: int | None = None) -> int:
    if flag is not None:
        return max(1, int(flag))
    env = os.environ.get(ENV_WORKERS)
    if env:
        try:
            return max(1, int(env))
        except ValueError:
            raise ValueError(f"{ENV_WORKERS} must be an integer, got {env!r}") from None
    return 1


def chunked_map(fn, items, workers: int, *args) -> list:
    """``fn(*args, chunk)`` over contiguous chunks of ``items``; flattened, in order."""
    items = np.asarray(items)
    workers = max(1, int(workers))
    if workers == 1 or len(items) < 2:
        return list(fn(*args, items))
    chunks = np.array_split(items, min(workers * 4, len(items)))
    with ProcessPoolExecutor(max_workers=workers) as pool:
        parts = list(pool.map(_call, [(fn, args, c) for c in chunks]))
    return [x for part in parts for x in part]


def _call(job):
    fn, args, chunk = job
    return list(fn(*args, chunk))
