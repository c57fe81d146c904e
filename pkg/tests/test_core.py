from collections import Counter

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from conftest import identity_hash
from hashgraph.core import (
    BuildConfig,
    Entry,
    HashGraph,
    InvariantError,
    bin_size,
    build_v1,
    build_v2,
    count_instances,
    hash_keys,
    hash_to_vertex,
    vertex_entries,
)

MASK = (1 << 64) - 1

BUILDS = [build_v1, build_v2]


def fmix64_reference(x):
    x ^= x >> 33
    x = (x * 0xFF51AFD7ED558CCD) & MASK
    x ^= x >> 33
    x = (x * 0xC4CEB9FE1A85EC53) & MASK
    x ^= x >> 33
    return x


def per_vertex_multisets(hg):
    return [Counter(vertex_entries(hg, v)) for v in range(hg.num_vertices)]


keys_strategy = st.lists(st.integers(0, 2**64 - 1), max_size=200)


class TestHash:
    def test_single_vertex(self):
        for key in (0, 1, 2**63, 2**64 - 1):
            assert hash_to_vertex(key, 17, 1) == 0

    def test_deterministic(self):
        assert hash_to_vertex(123456789, 7, 1000) == hash_to_vertex(123456789, 7, 1000)

    @settings(max_examples=200, deadline=None)
    @given(st.integers(0, 2**64 - 1), st.integers(0, 2**64 - 1), st.integers(1, 2**40))
    def test_matches_reference_mixer(self, key, seed, V):
        assert hash_to_vertex(key, seed, V) == fmix64_reference(key ^ seed) % V

    def test_occupancy(self):
        keys = np.arange(2**20, dtype=np.uint64)
        loads = np.bincount(hash_keys(keys, 0, 2**16), minlength=2**16)
        assert loads.max() <= 3 * loads.mean()

    def test_seed_changes_mapping(self):
        keys = np.arange(1000, dtype=np.uint64)
        assert not np.array_equal(hash_keys(keys, 0, 997), hash_keys(keys, 1, 997))

    def test_zero_vertices_rejected(self):
        with pytest.raises(ValueError):
            hash_keys(np.array([1], dtype=np.uint64), 0, 0)


class TestBuildConfig:
    def test_vertex_count(self):
        c = BuildConfig(load_factor=2)
        assert c.num_vertices(10) == 5
        assert c.num_vertices(1) == 1
        assert c.num_vertices(0) == 1
        assert BuildConfig(load_factor=0.25).num_vertices(10) == 40

    @pytest.mark.parametrize(
        "kwargs",
        [{"load_factor": 0}, {"load_factor": -1}, {"bin_count": 0}, {"mode": "gpu"}, {"hash_seed": -1}],
    )
    def test_rejects(self, kwargs):
        with pytest.raises(ValueError):
            BuildConfig(**kwargs)

    def test_sequential_mode_has_one_worker(self):
        assert BuildConfig(mode="sequential", threads=8).workers() == 1


@pytest.mark.parametrize("build", BUILDS)
class TestBuilds:
    def test_empty(self, build):
        hg = build([], BuildConfig(load_factor=0.5))
        assert hg.num_vertices >= 1
        assert not hg.offsets.any()
        assert hg.num_entries == 0
        hg.check_invariants()

    def test_stub_hand_trace(self, build, stub_hash):
        hg = build([5, 1, 5, 9], BuildConfig(load_factor=1, bin_count=2, mode="sequential"), hash_fn=stub_hash)
        assert hg.num_vertices == 4
        assert hg.offsets.tolist() == [0, 0, 4, 4, 4]
        assert Counter(hg.vertex_entries(1)) == Counter([Entry(5, 0), Entry(1, 1), Entry(5, 2), Entry(9, 3)])
        hg.check_invariants()

    def test_collision_fixture(self, build, collision_fixture):
        keys, seed = collision_fixture
        hg = build(keys, BuildConfig(load_factor=0.5, hash_seed=seed, bin_count=4))
        assert hg.num_vertices == 10
        sizes = sorted(hg.degrees().tolist(), reverse=True)
        assert sizes[0] == 3
        assert all(s <= 1 for s in sizes[1:])

    @settings(max_examples=100, deadline=None)
    @given(
        keys=keys_strategy,
        load=st.sampled_from([0.25, 0.5, 1, 2, 4]),
        bins=st.integers(1, 64),
        seed=st.integers(0, 2**64 - 1),
        mode=st.sampled_from(["sequential", "parallel"]),
    )
    def test_invariants_hold(self, build, keys, load, bins, seed, mode):
        hg = build(keys, BuildConfig(load_factor=load, bin_count=bins, hash_seed=seed, mode=mode, threads=3))
        hg.check_invariants()
        assert Counter(hg.edge_keys.tolist()) == Counter(keys)

    def test_counting_pass_matches_histogram(self, build):
        rng = np.random.default_rng(5)
        keys = rng.integers(1, 500, 3000, dtype=np.uint64)
        hg = build(keys, BuildConfig(load_factor=2, bin_count=16, hash_seed=9))
        expected = np.bincount(hash_keys(keys, 9, hg.num_vertices), minlength=hg.num_vertices)
        assert hg.degrees().tolist() == expected.tolist()

    def test_readonly(self, build):
        hg = build([1, 2, 3])
        with pytest.raises(ValueError):
            hg.edge_keys[0] = 4

    @pytest.mark.parametrize("bad", [np.array([1, -1]), [1, -1], [2**64], np.array([1.5])])
    def test_rejects_bad_keys(self, build, bad):
        with pytest.raises(ValueError):
            build(bad)

    def test_keys_above_int64(self, build):
        keys = [0, 2**63 + 1, 2**64 - 1]
        hg = build(keys)
        assert sorted(hg.edge_keys.tolist()) == keys


def test_v1_sequential_keeps_input_order(stub_hash):
    hg = build_v1([5, 1, 5, 9, 2], BuildConfig(load_factor=1, mode="sequential"), hash_fn=stub_hash)
    assert hg.vertex_entries(0).index.tolist() == [0, 2]
    assert hg.vertex_entries(4).index.tolist() == [3]


def test_v2_bin_size_ceiling():
    assert bin_size(10, 3) == 4
    assert bin_size(12, 3) == 4
    assert bin_size(5, 5) == 1


class TestEquivalence:
    @settings(max_examples=150, deadline=None)
    @given(
        keys=st.lists(st.integers(0, 300), max_size=400),
        load=st.sampled_from([0.25, 0.5, 1, 2, 4]),
        bins=st.integers(1, 100),
        seed=st.integers(0, 2**32),
    )
    def test_v2_matches_v1(self, keys, load, bins, seed):
        config = BuildConfig(load_factor=load, bin_count=bins, hash_seed=seed)
        a = build_v1(keys, config)
        b = build_v2(keys, config)
        assert np.array_equal(a.offsets, b.offsets)
        assert per_vertex_multisets(a) == per_vertex_multisets(b)
        assert a.same_entries(b)

    def test_one_bin(self):
        rng = np.random.default_rng(1)
        keys = rng.integers(1, 1000, 5000, dtype=np.uint64)
        config = BuildConfig(bin_count=1, mode="sequential")
        a = build_v1(keys, config)
        b = build_v2(keys, config)
        assert a.same_entries(b)
        # with one bin the reorganized copy is the input itself
        assert np.array_equal(a.edge_index, b.edge_index)

    def test_same_entries_detects_difference(self):
        a = build_v1([1, 2, 3, 4])
        b = build_v1([1, 2, 3, 5])
        assert not a.same_entries(b)


class TestDeterminism:
    def test_sequential_bit_identical(self):
        keys = np.random.default_rng(2).integers(1, 2**12, 20000, dtype=np.uint64)
        for build in BUILDS:
            config = BuildConfig(mode="sequential", bin_count=64)
            a, b = build(keys, config), build(keys, config)
            assert np.array_equal(a.edge_keys, b.edge_keys)
            assert np.array_equal(a.edge_index, b.edge_index)

    def test_parallel_same_multisets(self):
        keys = np.random.default_rng(3).integers(1, 2**10, 20000, dtype=np.uint64)
        ref = build_v1(keys, BuildConfig(mode="sequential"))
        for threads in (2, 5, 8):
            for build in BUILDS:
                hg = build(keys, BuildConfig(threads=threads, bin_count=32))
                assert np.array_equal(hg.offsets, ref.offsets)
                assert hg.same_entries(ref)


class TestVertexEntries:
    def test_empty_vertex(self, stub_hash):
        hg = build_v1([1, 1, 1], BuildConfig(load_factor=1), hash_fn=stub_hash)
        assert len(hg.vertex_entries(0)) == 0

    def test_collision_vertex(self, collision_fixture):
        keys, seed = collision_fixture
        hg = build_v2(keys, BuildConfig(load_factor=0.5, hash_seed=seed))
        v = hash_to_vertex(3, seed, hg.num_vertices)
        view = vertex_entries(hg, v)
        assert len(view) == 3
        assert Counter(view) == Counter([Entry(3, 0), Entry(3, 2), Entry(10121, 3)])

    def test_concatenation_is_edges(self):
        keys = np.random.default_rng(4).integers(1, 100, 500, dtype=np.uint64)
        hg = build_v2(keys, BuildConfig(load_factor=0.5))
        parts = [hg.vertex_entries(v).keys for v in range(hg.num_vertices)]
        assert np.array_equal(np.concatenate(parts), hg.edge_keys)
        assert list(hg.entries()) == [e for v in range(hg.num_vertices) for e in hg.vertex_entries(v)]

    def test_all_entries_hash_to_vertex(self):
        keys = np.random.default_rng(6).integers(1, 100, 500, dtype=np.uint64)
        hg = build_v1(keys, BuildConfig(load_factor=4, hash_seed=3))
        for v in range(hg.num_vertices):
            view = hg.vertex_entries(v)
            assert all(hash_to_vertex(e.key, 3, hg.num_vertices) == v for e in view)

    @pytest.mark.parametrize("v", [-1, 10])
    def test_bounds(self, v):
        hg = build_v1(range(10))
        with pytest.raises(IndexError):
            hg.vertex_entries(v)


class TestCountInstances:
    def test_absent(self):
        assert count_instances(build_v1([1, 2, 3]), 99) == 0

    def test_duplicates(self):
        keys = [7, 7, 7, 2]
        hg = build_v2(keys)
        for q in (7, 2, 3):
            assert count_instances(hg, q) == sum(1 for k in keys if k == q)

    def test_sequence(self):
        n = 2**12
        hg = build_v2(np.arange(1, n + 1, dtype=np.uint64), BuildConfig(load_factor=2))
        for k in (1, 17, n // 2, n):
            assert count_instances(hg, k) == 1
        assert count_instances(hg, n + 1) == 0

    def test_collisions_compare_full_keys(self, collision_fixture):
        keys, seed = collision_fixture
        hg = build_v1(keys, BuildConfig(load_factor=0.5, hash_seed=seed))
        assert count_instances(hg, 3) == 2
        assert count_instances(hg, 10121) == 1


class TestWorkCounts:
    @pytest.mark.parametrize("mult", [1, 8, 64])
    def test_v1(self, mult):
        n = 4096
        keys = np.random.default_rng(mult).integers(1, n // mult + 1, n, dtype=np.uint64)
        hg = build_v1(keys, BuildConfig(mode="sequential", load_factor=1))
        s = hg.stats
        assert s.hash_evaluations == 2 * n
        assert s.count_increments == n
        assert s.placement_writes == n
        assert s.bin_count_increments == s.bin_placement_writes == 0
        # zero, count, scan, zero, reserve
        assert s.vertex_counter_touches == 5 * hg.num_vertices

    @pytest.mark.parametrize("mult", [1, 8, 64])
    def test_v2(self, mult):
        n = 4096
        keys = np.random.default_rng(mult).integers(1, n // mult + 1, n, dtype=np.uint64)
        hg = build_v2(keys, BuildConfig(mode="sequential", load_factor=2, bin_count=64))
        s = hg.stats
        assert s.hash_evaluations == 4 * n
        assert s.bin_count_increments == s.bin_placement_writes == n
        assert s.count_increments == s.placement_writes == n
        assert s.bin_counter_touches == 5 * 64
        assert s.vertex_counter_touches == 5 * hg.num_vertices


class TestCheckInvariants:
    def _good(self):
        return build_v1([4, 8, 15, 16, 23, 42], BuildConfig(load_factor=2), hash_fn=identity_hash)

    def _clone(self, hg, **changes):
        fields = dict(
            num_vertices=hg.num_vertices,
            offsets=hg.offsets.copy(),
            edge_keys=hg.edge_keys.copy(),
            edge_index=hg.edge_index.copy(),
            hash_seed=hg.hash_seed,
            load_factor=hg.load_factor,
        )
        fields.update(changes)
        fields["hash_fn"] = identity_hash
        return HashGraph(**fields)

    def test_good_passes(self):
        self._good().check_invariants()

    def test_bad_total(self):
        hg = self._good()
        off = hg.offsets.copy()
        off[-1] += 1
        with pytest.raises(InvariantError):
            self._clone(hg, offsets=off).check_invariants()

    def test_wrong_vertex(self):
        hg = self._good()
        keys = hg.edge_keys.copy()
        keys[0] += 1
        with pytest.raises(InvariantError):
            self._clone(hg, edge_keys=keys).check_invariants()

    def test_duplicate_index(self):
        hg = self._good()
        idx = hg.edge_index.copy()
        idx[0] = idx[1]
        with pytest.raises(InvariantError):
            self._clone(hg, edge_index=idx).check_invariants()

    def test_non_monotone(self):
        hg = HashGraph(2, np.array([0, 2, 1]), np.array([1], dtype=np.uint64), np.array([0]), 0, 1.0)
        with pytest.raises(InvariantError):
            hg.check_invariants()
