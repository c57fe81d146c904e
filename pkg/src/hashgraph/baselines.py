"""Single-threaded reference tables used as cross-checks and for
operation-count comparisons: linear-probing open addressing, separate
chaining, and a sort-merge join.

Duplicates are kept as separate slots / nodes so every table has multiset
semantics, like HashGraph.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from hashgraph import _kernels
from hashgraph.core import Entry, _as_keys, hash_keys


@dataclass(eq=False)
class OpenAddressTable:
    """Linear-probing table. ``slot_index[s] < 0`` marks an empty slot.

    ``probe_steps`` is the number of slots examined while inserting.
    """

    slot_keys: np.ndarray
    slot_index: np.ndarray
    fill_target: float
    seed: int
    probe_steps: int

    @property
    def capacity(self) -> int:
        return self.slot_keys.shape[0]

    @property
    def occupied(self) -> int:
        return int(np.count_nonzero(self.slot_index >= 0))

    def home(self, keys: np.ndarray) -> np.ndarray:
        return hash_keys(keys, self.seed, self.capacity)

    def slot(self, s: int) -> Entry | None:
        if self.slot_index[s] < 0:
            return None
        return Entry(int(self.slot_keys[s]), int(self.slot_index[s]))

    def probe(self, probe_keys) -> tuple[int, int]:
        """Return ``(matches, slots_examined)`` over all probe keys."""
        probe_keys = _as_keys(probe_keys)
        matches, steps = _kernels.oa_probe(probe_keys, self.home(probe_keys), self.slot_keys, self.slot_index)
        return int(matches), int(steps)


def oa_build(keys, fill_target: float = 0.5, seed: int = 0) -> OpenAddressTable:
    """Insert every key by scanning forward from its home slot to the first empty one."""
    if not 0 < fill_target <= 1:
        raise ValueError(f"fill_target must be in (0, 1], got {fill_target}")
    keys = _as_keys(keys)
    n = keys.shape[0]
    capacity = max(1, math.ceil(n / fill_target))
    # capacity >= n, so the scan always finds an empty slot
    assert capacity >= n
    slot_keys = np.zeros(capacity, dtype=np.uint64)
    slot_index = np.full(capacity, -1, dtype=np.int64)
    homes = hash_keys(keys, seed, capacity)
    steps = _kernels.oa_insert(keys, homes, slot_keys, slot_index)
    return OpenAddressTable(slot_keys, slot_index, fill_target, seed, int(steps))


def oa_probe_all(table: OpenAddressTable, key: int) -> int:
    """Count all entries equal to ``key`` between its home slot and the next empty slot."""
    return table.probe(np.array([key], dtype=np.uint64))[0]


def oa_join_count(table: OpenAddressTable, probe_keys) -> int:
    return table.probe(probe_keys)[0]


@dataclass(eq=False)
class ChainTable:
    """Separate chaining with singly linked lists threaded through ``next``.

    Node ``i`` holds input entry ``i``; ``heads[b]`` is the first node of
    bucket ``b`` or -1.
    """

    heads: np.ndarray
    next: np.ndarray
    node_keys: np.ndarray
    seed: int

    @property
    def num_buckets(self) -> int:
        return self.heads.shape[0]

    def bucket(self, b: int) -> list[Entry]:
        out = []
        node = int(self.heads[b])
        while node >= 0:
            out.append(Entry(int(self.node_keys[node]), node))
            node = int(self.next[node])
        return out

    @property
    def size(self) -> int:
        """Number of nodes reachable from the bucket heads."""
        return int(_kernels.chain_walk(self.heads, self.next))

    def probe(self, probe_keys) -> tuple[int, int]:
        """Return ``(matches, nodes_visited)`` over all probe keys."""
        probe_keys = _as_keys(probe_keys)
        buckets = hash_keys(probe_keys, self.seed, self.num_buckets)
        matches, steps = _kernels.chain_probe(buckets, probe_keys, self.heads, self.next, self.node_keys)
        return int(matches), int(steps)


def chain_build(keys, load_factor: float = 1.0, seed: int = 0) -> ChainTable:
    if not load_factor > 0:
        raise ValueError("load_factor must be positive")
    keys = _as_keys(keys)
    n = keys.shape[0]
    num_buckets = max(1, math.floor(n / load_factor))
    heads = np.full(num_buckets, -1, dtype=np.int64)
    nxt = np.full(n, -1, dtype=np.int64)
    _kernels.chain_insert(hash_keys(keys, seed, num_buckets), heads, nxt)
    return ChainTable(heads, nxt, keys.copy(), seed)


def chain_probe_all(table: ChainTable, key: int) -> int:
    return table.probe(np.array([key], dtype=np.uint64))[0]


def chain_join_count(table: ChainTable, probe_keys) -> int:
    return table.probe(probe_keys)[0]


def sort_merge_join_count(keys_a, keys_b) -> int:
    """Inner-join cardinality by sorting both sides and merging equal-key runs."""
    a = np.sort(_as_keys(keys_a))
    b = np.sort(_as_keys(keys_b))
    return int(_kernels.merge_count(a, b))
