"""Execution primitives: index-range parallel-for, atomic counter arrays and
a chunked exclusive prefix sum.

Worker count comes from ``HASHGRAPH_THREADS`` when set, otherwise from the
hardware. A count of 1 runs everything inline on the calling thread.
"""

from __future__ import annotations

import os
import threading
from concurrent.futures import ThreadPoolExecutor
from typing import Callable, Sequence, TypeVar

import numpy as np

T = TypeVar("T")

THREADS_ENV = "HASHGRAPH_THREADS"

_INT64_MAX = np.iinfo(np.int64).max

_pools: dict[int, ThreadPoolExecutor] = {}
_pools_lock = threading.Lock()


class PrefixSumOverflowError(OverflowError):
    """Running total of a prefix sum does not fit in a 64-bit counter."""


def thread_count(threads: int | None = None) -> int:
    """Resolve the worker count.

    An explicit ``threads`` wins; otherwise ``HASHGRAPH_THREADS``; otherwise
    ``os.cpu_count()``.
    """
    if threads is not None:
        if threads < 1:
            raise ValueError(f"threads must be >= 1, got {threads}")
        return int(threads)
    env = os.environ.get(THREADS_ENV)
    if env:
        try:
            value = int(env)
        except ValueError:
            raise ValueError(f"{THREADS_ENV} must be a positive integer, got {env!r}") from None
        if value < 1:
            raise ValueError(f"{THREADS_ENV} must be a positive integer, got {env!r}")
        return value
    return os.cpu_count() or 1


def _pool(threads: int) -> ThreadPoolExecutor:
    with _pools_lock:
        pool = _pools.get(threads)
        if pool is None:
            pool = ThreadPoolExecutor(max_workers=threads, thread_name_prefix="hashgraph")
            _pools[threads] = pool
        return pool


def chunk_bounds(n: int, chunks: int) -> list[tuple[int, int]]:
    """Split ``[0, n)`` into at most ``chunks`` contiguous, non-empty ranges."""
    if n <= 0:
        return []
    chunks = max(1, min(chunks, n))
    edges = np.linspace(0, n, chunks + 1).astype(np.int64)
    return [(int(a), int(b)) for a, b in zip(edges[:-1], edges[1:]) if b > a]


def parallel_map_chunks(
    n: int, fn: Callable[[int, int], T], threads: int | None = None
) -> list[T]:
    """Call ``fn(start, stop)`` once per chunk of ``[0, n)``.

    Results come back in chunk order. With one worker the chunks run inline,
    in order, which is what sequential mode relies on.
    """
    workers = thread_count(threads)
    bounds = chunk_bounds(n, workers)
    if workers == 1 or len(bounds) <= 1:
        return [fn(a, b) for a, b in bounds]
    futures = [_pool(workers).submit(fn, a, b) for a, b in bounds]
    return [f.result() for f in futures]


def parallel_for(index_range: range | int, body: Callable[[int], object], threads: int | None = None) -> None:
    """Run ``body(i)`` exactly once for every ``i`` in ``index_range``.

    No ordering is guaranteed across indices when more than one worker is
    used. Shared state touched by ``body`` must go through a ``CounterArray``
    or be otherwise disjoint per index.
    """
    if isinstance(index_range, int):
        index_range = range(index_range)
    if len(index_range) == 0:
        return

    def run(a: int, b: int) -> None:
        for i in index_range[a:b]:
            body(i)

    parallel_map_chunks(len(index_range), run, threads)


class CounterArray:
    """Array of non-negative 64-bit counters supporting atomic updates.

    Single-slot updates go through :meth:`fetch_add`. :meth:`fetch_add_block`
    adds a whole per-worker histogram at once and hands back the pre-add
    values, which is how a worker reserves contiguous ranks for all of its
    items in one atomic step. ``touches`` counts element-level reads and
    writes made through this object, for work accounting.
    """

    def __init__(self, length: int):
        if length < 0:
            raise ValueError("length must be non-negative")
        self.counts = np.zeros(length, dtype=np.int64)
        self._lock = threading.Lock()
        self.touches = 0

    def __len__(self) -> int:
        return self.counts.shape[0]

    def __getitem__(self, index):
        return self.counts[index]

    def __repr__(self) -> str:
        return f"CounterArray({self.counts.tolist() if len(self) <= 16 else f'<{len(self)} counters>'})"

    def reset(self) -> None:
        with self._lock:
            self.counts[:] = 0
            self.touches += len(self)

    def fetch_add(self, index: int, delta: int = 1) -> int:
        if not 0 <= index < len(self):
            raise IndexError(f"counter index {index} out of range for length {len(self)}")
        if delta < 1:
            raise ValueError("delta must be positive")
        with self._lock:
            before = int(self.counts[index])
            self.counts[index] = before + delta
            self.touches += 1
        return before

    def fetch_add_block(self, deltas: np.ndarray) -> np.ndarray:
        """Atomically add ``deltas`` element-wise; return the values before the add."""
        if deltas.shape != self.counts.shape:
            raise ValueError(f"block shape {deltas.shape} does not match counters {self.counts.shape}")
        with self._lock:
            before = self.counts.copy()
            self.counts += deltas
            self.touches += len(self)
        return before

    def total(self) -> int:
        return int(self.counts.sum())


def atomic_fetch_add(counters: CounterArray, index: int, delta: int = 1) -> int:
    """Add ``delta`` to ``counters[index]``; return the value seen before the add."""
    return counters.fetch_add(index, delta)


def _check_overflow(counts: np.ndarray) -> None:
    if counts.size == 0:
        return
    top = int(counts.max())
    # cheap bound first; exact big-int sum only when the bound is inconclusive
    if top * counts.size <= _INT64_MAX:
        return
    if sum(int(c) for c in counts) > _INT64_MAX:
        raise PrefixSumOverflowError("prefix sum exceeds the 64-bit counter range")


def exclusive_prefix_sum(
    counts: CounterArray | Sequence[int] | np.ndarray,
    threads: int | None = None,
    chunks: int | None = None,
) -> np.ndarray:
    """Exclusive scan emitting ``len(counts) + 1`` offsets.

    ``offsets[0] == 0`` and ``offsets[-1] == sum(counts)``. With more than one
    chunk the scan runs in two passes: per-chunk totals, a scan over those
    totals, then a per-chunk rescan seeded with the chunk's base. ``chunks``
    overrides the chunk count (defaults to the worker count).
    """
    if isinstance(counts, CounterArray):
        with counts._lock:
            counts.touches += len(counts)
        arr = counts.counts
    else:
        arr = np.asarray(counts)
        if arr.dtype.kind not in "iu":
            arr = arr.astype(np.int64)
    if arr.size and int(arr.min()) < 0:
        raise ValueError("counts must be non-negative")
    _check_overflow(arr)
    arr = arr.astype(np.int64, copy=False)

    n = arr.shape[0]
    out = np.zeros(n + 1, dtype=np.int64)
    workers = thread_count(threads)
    bounds = chunk_bounds(n, chunks if chunks is not None else workers)
    if len(bounds) <= 1:
        np.cumsum(arr, out=out[1:])
        return out

    sums = parallel_map_chunks(len(bounds), lambda a, b: [int(arr[s:e].sum()) for s, e in bounds[a:b]], workers)
    chunk_sums = np.array([s for part in sums for s in part], dtype=np.int64)
    bases = np.zeros(len(bounds), dtype=np.int64)
    np.cumsum(chunk_sums[:-1], out=bases[1:])

    def rescan(a: int, b: int) -> None:
        for c in range(a, b):
            s, e = bounds[c]
            np.cumsum(arr[s:e], out=out[s + 1 : e + 1])
            out[s + 1 : e + 1] += bases[c]

    parallel_map_chunks(len(bounds), rescan, workers)
    return out
