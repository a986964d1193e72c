"""Work-unit parallelism over fixed-size chunks of target points."""

import os
from concurrent.futures import ThreadPoolExecutor

import numpy as np

from .errors import DomainError

CHUNK_SIZE = 256

_threads = None


def set_threads(n):
    global _threads
    if n is not None and int(n) < 1:
        raise DomainError(f"thread count must be >= 1, got {n}")
    _threads = None if n is None else int(n)


def get_threads():
    if _threads is not None:
        return _threads
    env = os.environ.get("DUNKLKIT_THREADS", "").strip()
    return int(env) if env.isdigit() and int(env) > 0 else 1


def map_chunks(fn, points, chunk=CHUNK_SIZE, threads=None):
    """Apply `fn` to consecutive slices of `points` and concatenate the results.

    Chunk boundaries depend only on `chunk`, never on the thread count, so every
    reduction sees the same operands in the same order.
    """
    points = np.asarray(points)
    n = points.shape[0]
    if n <= chunk:
        return np.asarray(fn(points))
    slices = [slice(i, min(i + chunk, n)) for i in range(0, n, chunk)]
    threads = threads or get_threads()
    if threads <= 1:
        parts = [np.asarray(fn(points[s])) for s in slices]
    else:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            parts = [np.asarray(p) for p in pool.map(lambda s: fn(points[s]), slices)]
    return np.concatenate(parts, axis=0)
