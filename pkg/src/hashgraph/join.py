"""Inner joins on HashGraph tables.

``probe_standard`` looks every probe key up in one table. ``probe_new``
builds a second table over the probe input with the same hash range and
intersects the two tables vertex by vertex, so each segment of the first
table is loaded once and reused for every matching probe entry.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable

import numpy as np

from hashgraph import _kernels
from hashgraph.core import BuildConfig, EntryView, HashGraph, _as_keys, build_v2
from hashgraph.parallel import CounterArray, parallel_map_chunks, thread_count

DEFAULT_PAIR_CAP = 2**24


@dataclass
class JoinResult:
    """Join cardinality plus optional ``(index_in_A, index_in_B)`` pairs.

    ``match_count`` is exact even when ``pairs`` was cut off at the cap;
    ``truncated`` records that. ``comparisons`` counts full-key comparisons.
    """

    match_count: int
    pairs: np.ndarray | None = None
    truncated: bool = False
    comparisons: int = 0

    def sorted_pairs(self) -> np.ndarray:
        if self.pairs is None:
            raise ValueError("pairs were not materialized")
        p = self.pairs
        return p[np.lexsort((p[:, 1], p[:, 0]))]


def _collect(chunk_counts, emit, n_items, cap, workers) -> tuple[np.ndarray, bool]:
    """Materialize pairs: each chunk reserves its output range atomically."""
    total = sum(chunk_counts)
    out = np.empty((min(total, cap), 2), dtype=np.int64)
    cursor = CounterArray(1)

    def work(a, b):
        want = sum(chunk_counts[a:b])
        if want == 0:
            return 0
        start = cursor.fetch_add(0, want)
        if start >= cap:
            return 0
        return emit(a, b, out, start, cap)

    # one emit task per original chunk keeps the reservation sizes exact
    parallel_map_chunks(n_items, work, workers)
    return out, total > cap


def probe_standard(
    hg: HashGraph,
    probe_keys,
    materialize: bool = False,
    cap: int = DEFAULT_PAIR_CAP,
    threads: int | None = None,
) -> JoinResult:
    """Count (and optionally collect) all matches of ``probe_keys`` in ``hg``.

    Every probe key scans only the segment of the vertex it hashes to and
    counts all entries with an equal key, not just the first.
    """
    if cap < 1:
        raise ValueError("cap must be positive")
    probe = _as_keys(probe_keys)
    workers = thread_count(threads)
    m = probe.shape[0]

    def count(a, b):
        vids = hg.vertex_of(probe[a:b])
        matches, comps = _kernels.probe_count(vids, probe[a:b], hg.offsets, hg.edge_keys)
        return a, b, vids, int(matches), int(comps)

    parts = parallel_map_chunks(m, count, workers)
    result = JoinResult(sum(p[3] for p in parts), comparisons=sum(p[4] for p in parts))
    if not materialize:
        return result
    bounds = [(p[0], p[1]) for p in parts]
    vids_of = [p[2] for p in parts]

    def emit(c0, c1, out, start, limit):
        written = 0
        pos = start
        for c in range(c0, c1):
            a, b = bounds[c]
            w = _kernels.probe_emit(vids_of[c], probe[a:b], a, hg.offsets, hg.edge_keys, hg.edge_index, out, pos, limit)
            pos += parts[c][3]
            written += w
        return written

    result.pairs, result.truncated = _collect([p[3] for p in parts], emit, len(parts), cap, workers)
    return result


def intersect_adjacency(
    seg_a: EntryView, seg_b: EntryView, emit: Callable[[int, int], object] | None = None
) -> int:
    """Nested-loop intersection of two segments of the same vertex.

    Keys are compared in full since a vertex may hold colliding keys.
    ``emit(index_in_a, index_in_b)`` is called for every match.
    """
    count = 0
    for a in seg_a:
        for b in seg_b:
            if a.key == b.key:
                count += 1
                if emit is not None:
                    emit(a.index, b.index)
    return count


def intersect_tables(
    hg_a: HashGraph,
    hg_b: HashGraph,
    materialize: bool = False,
    cap: int = DEFAULT_PAIR_CAP,
    threads: int | None = None,
) -> JoinResult:
    """Intersect corresponding vertex segments of two tables.

    Both tables must share the hash seed and vertex count.
    """
    if hg_a.num_vertices != hg_b.num_vertices or hg_a.hash_seed != hg_b.hash_seed:
        raise ValueError("tables must share num_vertices and hash_seed to be intersected")
    if cap < 1:
        raise ValueError("cap must be positive")
    workers = thread_count(threads)
    V = hg_a.num_vertices

    def count(a, b):
        matches, comps = _kernels.intersect_count(hg_a.offsets, hg_a.edge_keys, hg_b.offsets, hg_b.edge_keys, a, b)
        return a, b, int(matches), int(comps)

    parts = parallel_map_chunks(V, count, workers)
    result = JoinResult(sum(p[2] for p in parts), comparisons=sum(p[3] for p in parts))
    if not materialize:
        return result

    def emit(c0, c1, out, start, limit):
        written = 0
        pos = start
        for c in range(c0, c1):
            a, b = parts[c][0], parts[c][1]
            written += _kernels.intersect_emit(
                hg_a.offsets, hg_a.edge_keys, hg_a.edge_index,
                hg_b.offsets, hg_b.edge_keys, hg_b.edge_index,
                a, b, out, pos, limit,
            )
            pos += parts[c][2]
        return written

    result.pairs, result.truncated = _collect([p[2] for p in parts], emit, len(parts), cap, workers)
    return result


def shared_vertex_count(n_a: int, n_b: int, config: BuildConfig) -> int:
    """Vertex count used for both tables of a dual-table probe."""
    return config.num_vertices(max(n_a, n_b))


def probe_new(
    keys_a,
    keys_b,
    config: BuildConfig = BuildConfig(),
    materialize: bool = False,
    cap: int = DEFAULT_PAIR_CAP,
) -> JoinResult:
    """Join by building a table per input and intersecting their segments."""
    keys_a = _as_keys(keys_a)
    keys_b = _as_keys(keys_b)
    V = shared_vertex_count(keys_a.shape[0], keys_b.shape[0], config)
    hg_a = build_v2(keys_a, config, num_vertices=V)
    hg_b = build_v2(keys_b, config, num_vertices=V)
    return intersect_tables(hg_a, hg_b, materialize, cap, threads=config.workers())
