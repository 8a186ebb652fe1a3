"""Worker pool for the row/column-independent kernels.

Every batched kernel takes a half-open range ``[lo, hi)`` over its independent
axis. ``run_chunks`` splits that axis into contiguous blocks, one per worker.
Each row (or column) is computed by the same arithmetic no matter which block
it lands in, so results do not depend on the worker count.
"""
import os
import threading
from concurrent.futures import ThreadPoolExecutor
from contextlib import contextmanager

ENV_WORKERS = "ADIWAVE_WORKERS"

# below this many rows a chunked dispatch costs more than it saves
MIN_ROWS_PER_WORKER = 16

_lock = threading.Lock()
_workers = None
_executor = None


def default_workers():
    value = os.environ.get(ENV_WORKERS)
    if value:
        try:
            n = int(value)
        except ValueError:
            n = 1
        return max(n, 1)
    return 1


def get_workers():
    global _workers
    if _workers is None:
        _workers = default_workers()
    return _workers


def set_workers(n):
    """Set the pool size used by subsequent kernel calls."""
    global _workers, _executor
    n = int(n)
    if n < 1:
        raise ValueError(f"workers must be >= 1, got {n}")
    with _lock:
        if n != _workers and _executor is not None:
            _executor.shutdown(wait=True)
            _executor = None
        _workers = n


@contextmanager
def workers(n):
    previous = get_workers()
    set_workers(n)
    try:
        yield
    finally:
        set_workers(previous)


def _get_executor(n):
    global _executor
    with _lock:
        if _executor is None:
            _executor = ThreadPoolExecutor(max_workers=n, thread_name_prefix="adiwave")
        return _executor


def split(count, parts):
    """Contiguous ``(lo, hi)`` blocks covering ``range(count)``."""
    parts = max(1, min(parts, count))
    base, extra = divmod(count, parts)
    bounds = []
    lo = 0
    for p in range(parts):
        hi = lo + base + (1 if p < extra else 0)
        bounds.append((lo, hi))
        lo = hi
    return bounds


def run_chunks(fn, count):
    """Call ``fn(lo, hi)`` over blocks of ``range(count)``, possibly concurrently."""
    n = get_workers()
    if n == 1 or count < 2 * MIN_ROWS_PER_WORKER:
        fn(0, count)
        return
    n = min(n, count // MIN_ROWS_PER_WORKER)
    blocks = split(count, n)
    pool = _get_executor(get_workers())
    futures = [pool.submit(fn, lo, hi) for lo, hi in blocks[1:]]
    lo, hi = blocks[0]
    fn(lo, hi)
    for f in futures:
        f.result()
