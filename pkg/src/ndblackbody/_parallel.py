"""Ordered thread-pool map used by the sampling and mode-sum kernels.

Results always come back in input order, so any reduction performed by the
caller sees the same sequence regardless of the thread count.
"""

from concurrent.futures import ThreadPoolExecutor
import os

THREADS_ENV = "NDBLACKBODY_THREADS"


def thread_count():
    """Worker count from ``NDBLACKBODY_THREADS``; all CPUs when unset."""
    raw = os.environ.get(THREADS_ENV, "").strip()
    if raw:
        try:
            n = int(raw)
        except ValueError:
            raise ValueError(f"{THREADS_ENV} must be a positive integer, got {raw!r}") from None
        if n < 1:
            raise ValueError(f"{THREADS_ENV} must be a positive integer, got {raw!r}")
        return n
    return os.cpu_count() or 1


def ordered_map(fn, items, threads=None):
    items = list(items)
    threads = thread_count() if threads is None else int(threads)
    if threads <= 1 or len(items) <= 1:
        return [fn(item) for item in items]
    with ThreadPoolExecutor(max_workers=threads) as pool:
        return list(pool.map(fn, items))
