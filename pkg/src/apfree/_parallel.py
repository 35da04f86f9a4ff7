"""Deterministic shard execution.

Shards are always formed the same way regardless of the worker count, and
results come back in shard order, so merged output never depends on
scheduling.
"""

import os
from concurrent.futures import ProcessPoolExecutor


def default_threads() -> int:
    try:
        return max(1, int(os.environ.get("APFREE_THREADS", "1")))
    except ValueError:
        return 1


def run_shards(fn, shards, threads=None):
    """Map ``fn`` over ``shards`` and return results in shard order."""
    shards = list(shards)
    threads = default_threads() if threads is None else max(1, int(threads))
    if threads == 1 or len(shards) <= 1:
        return [fn(s) for s in shards]
    with ProcessPoolExecutor(max_workers=min(threads, len(shards))) as pool:
        return list(pool.map(fn, shards, chunksize=max(1, len(shards) // (4 * threads))))
