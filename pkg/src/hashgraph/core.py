"""The HashGraph table: a CSR layout where vertices are hash values and edges
point back to the input entries hashed to them.

Two builders produce the same table (up to the order of entries inside a
vertex): :func:`build_v1` hashes, counts and places directly, while
:func:`build_v2` first reorganizes the input into coarse bins of the vertex
range so the final counting and placement passes touch memory locally.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable, Iterator, NamedTuple

import numpy as np

from hashgraph import _kernels
from hashgraph.parallel import CounterArray, exclusive_prefix_sum, parallel_map_chunks, thread_count

HashFn = Callable[[np.ndarray, int, int], np.ndarray]

DEFAULT_BIN_COUNT = 2**15
DEFAULT_LOAD_FACTOR = 1.0


class InvariantError(AssertionError):
    """A built table violates one of the CSR invariants."""


def hash_keys(keys: np.ndarray, seed: int, num_vertices: int) -> np.ndarray:
    """Map every key to a vertex id in ``[0, num_vertices)``.

    The key is xor-ed with the seed and run through the 64-bit Murmur3
    finalizer before the modulo.
    """
    if num_vertices < 1:
        raise ValueError("num_vertices must be >= 1")
    keys = np.ascontiguousarray(keys, dtype=np.uint64)
    out = np.empty(keys.shape[0], dtype=np.int64)
    _kernels.hash_mod(keys, np.uint64(seed), num_vertices, out)
    return out


def hash_to_vertex(key: int, seed: int, num_vertices: int) -> int:
    return int(hash_keys(np.array([key], dtype=np.uint64), seed, num_vertices)[0])


class Entry(NamedTuple):
    key: int
    index: int


@dataclass(frozen=True)
class BuildConfig:
    """Parameters for building a table.

    ``load_factor`` sets the hash range: ``V = max(1, floor(N / load_factor))``.
    ``bin_count`` is only used by :func:`build_v2` and is clamped to ``V``.
    ``threads`` overrides ``HASHGRAPH_THREADS`` in parallel mode.
    """

    load_factor: float = DEFAULT_LOAD_FACTOR
    bin_count: int = DEFAULT_BIN_COUNT
    hash_seed: int = 0
    mode: str = "parallel"
    threads: int | None = None

    def __post_init__(self):
        if not self.load_factor > 0:
            raise ValueError(f"load_factor must be positive, got {self.load_factor}")
        if self.bin_count < 1:
            raise ValueError(f"bin_count must be >= 1, got {self.bin_count}")
        if self.mode not in ("sequential", "parallel"):
            raise ValueError(f"mode must be 'sequential' or 'parallel', got {self.mode!r}")
        if not 0 <= self.hash_seed < 2**64:
            raise ValueError("hash_seed must fit in 64 unsigned bits")

    def num_vertices(self, n: int) -> int:
        return max(1, math.floor(n / self.load_factor))

    def workers(self) -> int:
        return 1 if self.mode == "sequential" else thread_count(self.threads)


@dataclass
class BuildStats:
    """Operation counts gathered while building, for work accounting."""

    hash_evaluations: int = 0
    count_increments: int = 0
    placement_writes: int = 0
    bin_count_increments: int = 0
    bin_placement_writes: int = 0
    vertex_counter_touches: int = 0
    bin_counter_touches: int = 0


class EntryView:
    """Read-only view of one vertex's adjacency segment."""

    __slots__ = ("keys", "index")

    def __init__(self, keys: np.ndarray, index: np.ndarray):
        self.keys = keys
        self.index = index

    def __len__(self) -> int:
        return self.keys.shape[0]

    def __getitem__(self, i: int) -> Entry:
        return Entry(int(self.keys[i]), int(self.index[i]))

    def __iter__(self) -> Iterator[Entry]:
        for k, i in zip(self.keys.tolist(), self.index.tolist()):
            yield Entry(k, i)

    def __repr__(self) -> str:
        return f"EntryView({list(self)})"


def _readonly(a: np.ndarray) -> np.ndarray:
    a.flags.writeable = False
    return a


@dataclass(eq=False)
class HashGraph:
    """Static hash table in CSR form.

    ``offsets`` has ``num_vertices + 1`` entries; the entries hashed to vertex
    ``v`` live in ``edge_keys[offsets[v]:offsets[v+1]]`` with their input
    positions in the matching slice of ``edge_index``.
    """

    num_vertices: int
    offsets: np.ndarray
    edge_keys: np.ndarray
    edge_index: np.ndarray
    hash_seed: int
    load_factor: float
    hash_fn: HashFn = field(default=hash_keys, repr=False)
    stats: BuildStats | None = field(default=None, repr=False)

    @property
    def num_entries(self) -> int:
        return self.edge_keys.shape[0]

    def degrees(self) -> np.ndarray:
        return np.diff(self.offsets)

    def vertex_of(self, keys: np.ndarray) -> np.ndarray:
        return self.hash_fn(np.asarray(keys, dtype=np.uint64), self.hash_seed, self.num_vertices)

    def vertex_entries(self, v: int) -> EntryView:
        if not 0 <= v < self.num_vertices:
            raise IndexError(f"vertex {v} out of range for {self.num_vertices} vertices")
        a, b = self.offsets[v], self.offsets[v + 1]
        return EntryView(self.edge_keys[a:b], self.edge_index[a:b])

    def count_instances(self, key: int) -> int:
        v = int(self.vertex_of(np.array([key], dtype=np.uint64))[0])
        seg = self.edge_keys[self.offsets[v] : self.offsets[v + 1]]
        return int(np.count_nonzero(seg == np.uint64(key)))

    def entries(self) -> Iterator[Entry]:
        for k, i in zip(self.edge_keys.tolist(), self.edge_index.tolist()):
            yield Entry(k, i)

    def edge_vertices(self) -> np.ndarray:
        """Vertex id of every edge position, derived from the offsets."""
        return np.repeat(np.arange(self.num_vertices, dtype=np.int64), self.degrees())

    def check_invariants(self) -> None:
        """Raise :class:`InvariantError` unless every CSR invariant holds."""
        off = self.offsets
        n = self.num_entries
        if off.shape != (self.num_vertices + 1,):
            raise InvariantError(f"offsets has shape {off.shape}, expected ({self.num_vertices + 1},)")
        if off[0] != 0:
            raise InvariantError(f"offsets[0] == {off[0]}")
        if off[-1] != n:
            raise InvariantError(f"offsets[V] == {off[-1]} but table holds {n} entries")
        if np.any(np.diff(off) < 0):
            raise InvariantError("offsets are not non-decreasing")
        if self.edge_index.shape != (n,):
            raise InvariantError("edge_index and edge_keys differ in length")
        if n:
            if not np.array_equal(self.vertex_of(self.edge_keys), self.edge_vertices()):
                raise InvariantError("an entry is stored under a vertex its key does not hash to")
            idx = self.edge_index
            if idx.min() < 0 or idx.max() >= n:
                raise InvariantError("entry index outside [0, N)")
            if not np.all(np.bincount(idx, minlength=n) == 1):
                raise InvariantError("entry indices are not a permutation of 0..N-1")

    def canonical(self) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
        """(offsets, keys, index) with each vertex's entries sorted by index.

        Two tables with equal canonical forms hold the same per-vertex
        multisets of entries.
        """
        order = np.lexsort((self.edge_index, self.edge_vertices()))
        return self.offsets, self.edge_keys[order], self.edge_index[order]

    def same_entries(self, other: HashGraph) -> bool:
        if self.num_vertices != other.num_vertices:
            return False
        return all(np.array_equal(a, b) for a, b in zip(self.canonical(), other.canonical()))


def vertex_entries(hg: HashGraph, v: int) -> EntryView:
    return hg.vertex_entries(v)


def count_instances(hg: HashGraph, key: int) -> int:
    return hg.count_instances(key)


class _Builder:
    """Shared machinery for the count / prefix-sum / place passes."""

    def __init__(self, config: BuildConfig, hash_fn: HashFn, num_vertices: int):
        self.config = config
        self.hash_fn = hash_fn
        self.V = num_vertices
        self.seed = config.hash_seed
        self.workers = config.workers()
        self.stats = BuildStats()

    def hash(self, keys: np.ndarray) -> np.ndarray:
        vids = self.hash_fn(keys, self.seed, self.V)
        return vids

    def count_pass(self, n, bucket_of, counter: CounterArray) -> int:
        """Histogram every item's bucket into ``counter``; returns increments."""
        nbuckets = len(counter)

        def work(a, b):
            local = np.zeros(nbuckets, dtype=np.int64)
            buckets, hashed = bucket_of(a, b)
            done = _kernels.histogram(buckets, local)
            counter.fetch_add_block(local)
            return done, hashed

        parts = parallel_map_chunks(n, work, self.workers)
        self.stats.hash_evaluations += sum(h for _, h in parts)
        return sum(d for d, _ in parts)

    def place_pass(self, n, bucket_of, payload_of, offsets, counter: CounterArray, out_keys, out_index) -> int:
        """Write each item to ``offsets[bucket] + rank``; returns writes.

        Every chunk reserves ranks for all of its items with one atomic
        block add on ``counter`` and then places them in input order.
        """
        nbuckets = len(counter)

        def work(a, b):
            buckets, hashed = bucket_of(a, b)
            local = np.zeros(nbuckets, dtype=np.int64)
            _kernels.histogram(buckets, local)
            base = counter.fetch_add_block(local)
            keys, src = payload_of(a, b)
            done = _kernels.scatter(buckets, keys, src, offsets, base, out_keys, out_index)
            return done, hashed

        parts = parallel_map_chunks(n, work, self.workers)
        self.stats.hash_evaluations += sum(h for _, h in parts)
        return sum(d for d, _ in parts)

    def vertex_pass(self, keys: np.ndarray, index: np.ndarray | None) -> HashGraph:
        """Count, scan and place ``keys`` into a fresh table.

        ``index`` carries original input positions; ``None`` means the keys
        are the original input in order.
        """
        n = keys.shape[0]
        V = self.V

        def bucket_of(a, b):
            return self.hash(keys[a:b]), b - a

        def payload_of(a, b):
            src = np.arange(a, b, dtype=np.int64) if index is None else index[a:b]
            return keys[a:b], src

        counter = CounterArray(V)
        counter.reset()
        self.stats.count_increments += self.count_pass(n, bucket_of, counter)
        offsets = exclusive_prefix_sum(counter, threads=self.workers)
        counter.reset()
        edge_keys = np.empty(n, dtype=np.uint64)
        edge_index = np.empty(n, dtype=np.int64)
        self.stats.placement_writes += self.place_pass(
            n, bucket_of, payload_of, offsets, counter, edge_keys, edge_index
        )
        self.stats.vertex_counter_touches += counter.touches
        return HashGraph(
            num_vertices=V,
            offsets=_readonly(offsets),
            edge_keys=_readonly(edge_keys),
            edge_index=_readonly(edge_index),
            hash_seed=self.seed,
            load_factor=self.config.load_factor,
            hash_fn=self.hash_fn,
            stats=self.stats,
        )


def _as_keys(keys) -> np.ndarray:
    if not isinstance(keys, np.ndarray):
        # going through a default dtype would round keys >= 2**63 via float64
        try:
            keys = np.array(keys, dtype=np.uint64)
        except OverflowError:
            raise ValueError("keys must be in [0, 2**64)") from None
    if keys.ndim != 1:
        raise ValueError("keys must be one-dimensional")
    if keys.dtype.kind not in "iu":
        raise ValueError(f"keys must be integers, got dtype {keys.dtype}")
    if keys.size and keys.dtype.kind == "i" and keys.min() < 0:
        raise ValueError("keys must be non-negative")
    return np.ascontiguousarray(keys, dtype=np.uint64)


def build_v1(
    keys,
    config: BuildConfig = BuildConfig(),
    *,
    num_vertices: int | None = None,
    hash_fn: HashFn = hash_keys,
) -> HashGraph:
    """Build a table with one counting pass and one placement pass.

    Each pass hashes the keys it walks over, so every key is hashed twice.
    ``num_vertices`` overrides the vertex count derived from the load factor.
    """
    keys = _as_keys(keys)
    V = num_vertices if num_vertices is not None else config.num_vertices(keys.shape[0])
    return _Builder(config, hash_fn, V).vertex_pass(keys, None)


def bin_size(num_vertices: int, bins: int) -> int:
    return -(-num_vertices // bins)


def build_v2(
    keys,
    config: BuildConfig = BuildConfig(),
    *,
    num_vertices: int | None = None,
    hash_fn: HashFn = hash_keys,
) -> HashGraph:
    """Build a table after reorganizing the input by coarse vertex bins.

    Phase 1 counts keys per bin (``vertex // bin_size``), phase 2 scatters
    ``(key, position)`` pairs into a bin-grouped copy of the input, and
    phase 3 runs the count and placement passes of :func:`build_v1` over
    that copy. Each of the four passes hashes its keys.
    """
    keys = _as_keys(keys)
    n = keys.shape[0]
    builder = _Builder(config, hash_fn, num_vertices if num_vertices is not None else config.num_vertices(n))
    V = builder.V
    bins = min(config.bin_count, V)
    size = bin_size(V, bins)

    def bin_of(a, b):
        return builder.hash(keys[a:b]) // size, b - a

    def payload_of(a, b):
        return keys[a:b], np.arange(a, b, dtype=np.int64)

    bin_counter = CounterArray(bins)
    bin_counter.reset()
    builder.stats.bin_count_increments += builder.count_pass(n, bin_of, bin_counter)
    bin_offsets = exclusive_prefix_sum(bin_counter, threads=builder.workers)
    bin_counter.reset()
    reorg_keys = np.empty(n, dtype=np.uint64)
    reorg_index = np.empty(n, dtype=np.int64)
    builder.stats.bin_placement_writes += builder.place_pass(
        n, bin_of, payload_of, bin_offsets, bin_counter, reorg_keys, reorg_index
    )
    builder.stats.bin_counter_touches += bin_counter.touches
    return builder.vertex_pass(reorg_keys, reorg_index)
