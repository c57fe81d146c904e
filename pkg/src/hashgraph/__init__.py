"""HashGraph: static hash tables laid out as a CSR sparse graph."""

from hashgraph.core import (
    BuildConfig,
    BuildStats,
    Entry,
    EntryView,
    HashGraph,
    InvariantError,
    build_v1,
    build_v2,
    count_instances,
    hash_keys,
    hash_to_vertex,
    vertex_entries,
)
from hashgraph.baselines import (
    ChainTable,
    OpenAddressTable,
    chain_build,
    chain_join_count,
    oa_build,
    oa_join_count,
    sort_merge_join_count,
)
from hashgraph.join import JoinResult, intersect_adjacency, intersect_tables, probe_new, probe_standard
from hashgraph.keygen import KeySpec, empirical_multiplicity, generate, read_keys, write_keys
from hashgraph.parallel import CounterArray, atomic_fetch_add, exclusive_prefix_sum, parallel_for

__all__ = [
    "empirical_multiplicity",
    "sort_merge_join_count",
    "oa_join_count",
    "oa_build",
    "chain_join_count",
    "chain_build",
    "OpenAddressTable",
    "ChainTable",
    "BuildConfig",
    "BuildStats",
    "CounterArray",
    "Entry",
    "EntryView",
    "HashGraph",
    "InvariantError",
    "JoinResult",
    "KeySpec",
    "atomic_fetch_add",
    "build_v1",
    "build_v2",
    "count_instances",
    "exclusive_prefix_sum",
    "generate",
    "hash_keys",
    "hash_to_vertex",
    "intersect_adjacency",
    "intersect_tables",
    "parallel_for",
    "probe_new",
    "probe_standard",
    "read_keys",
    "vertex_entries",
    "write_keys",
]
