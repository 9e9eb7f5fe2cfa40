"""Chunked fan-out for verification batches.

Chunk boundaries are a fixed function of the sample count, and folded results
are consumed in chunk order, so reports never depend on worker scheduling.
The pool size is capped by the CROWN_THREADS environment variable.
"""

from __future__ import annotations

import os
from concurrent.futures import ThreadPoolExecutor

CHUNK = 512


def thread_count(explicit: int | None = None) -> int:
    if explicit is not None:
        return max(1, int(explicit))
    raw = os.environ.get("CROWN_THREADS")
    if raw is None:
        return 1
    value = int(raw)
    if value < 1:
        raise ValueError("CROWN_THREADS must be a positive integer")
    return value


def chunk_ranges(total: int, chunk: int = CHUNK):
    return [(lo, min(lo + chunk, total)) for lo in range(0, total, chunk)]


def map_chunks(fn, ranges, threads: int | None = None):
    """Apply fn to each (lo, hi) range; results are returned in range order."""
    workers = thread_count(threads)
    if workers == 1 or len(ranges) <= 1:
        return [fn(lo, hi) for lo, hi in ranges]
    with ThreadPoolExecutor(max_workers=workers) as pool:
        futures = [pool.submit(fn, lo, hi) for lo, hi in ranges]
        return [f.result() for f in futures]
