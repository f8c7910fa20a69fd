"""Worker-count control for the batched Fock-space sweeps.

The environment variable QPSF_THREADS caps the number of worker
threads (default: hardware concurrency).  Workers only ever write to
disjoint slices of preallocated arrays, so no locking is needed.
"""

import os
from concurrent.futures import ThreadPoolExecutor


def thread_count() -> int:
    raw = os.environ.get("QPSF_THREADS", "")
    if raw:
        try:
            n = int(raw)
        except ValueError:
            n = 1
        return max(1, n)
    return max(1, os.cpu_count() or 1)


def run_chunked(fn, chunks):
    """Apply fn to every chunk, threading when it pays off.

    fn must write its results to preallocated storage; return values
    are discarded.
    """
    workers = min(thread_count(), len(chunks))
    if workers <= 1 or len(chunks) <= 1:
        for c in chunks:
            fn(c)
        return
    with ThreadPoolExecutor(max_workers=workers) as pool:
        list(pool.map(fn, chunks))
