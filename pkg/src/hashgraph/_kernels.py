"""Compiled inner loops. All kernels release the GIL so the thread pool in
:mod:`hashgraph.parallel` gets real concurrency.

Each kernel returns the number of loop iterations it performed (or a tuple
of counters) so callers can account for work exactly.
"""

import numpy as np
from numba import njit

_jit = njit(nogil=True, cache=True)

_M1 = np.uint64(0xFF51AFD7ED558CCD)
_M2 = np.uint64(0xC4CEB9FE1A85EC53)
_S33 = np.uint64(33)


@_jit
def fmix64(x):
    x ^= x >> _S33
    x *= _M1
    x ^= x >> _S33
    x *= _M2
    x ^= x >> _S33
    return x


@_jit
def hash_mod(keys, seed, nbuckets, out):
    m = np.uint64(nbuckets)
    for i in range(keys.shape[0]):
        out[i] = np.int64(fmix64(keys[i] ^ seed) % m)
    return keys.shape[0]


@_jit
def histogram(vids, counts):
    for i in range(vids.shape[0]):
        counts[vids[i]] += 1
    return vids.shape[0]


@_jit
def scatter(vids, keys, src_index, offsets, base, out_keys, out_index):
    # base holds this chunk's reserved rank per bucket and is advanced in place
    for i in range(vids.shape[0]):
        v = vids[i]
        pos = offsets[v] + base[v]
        base[v] += 1
        out_keys[pos] = keys[i]
        out_index[pos] = src_index[i]
    return vids.shape[0]


@_jit
def probe_count(vids, probe_keys, offsets, edge_keys):
    matches = 0
    comparisons = 0
    for i in range(vids.shape[0]):
        v = vids[i]
        k = probe_keys[i]
        for j in range(offsets[v], offsets[v + 1]):
            comparisons += 1
            if edge_keys[j] == k:
                matches += 1
    return matches, comparisons


@_jit
def probe_emit(vids, probe_keys, probe_start, offsets, edge_keys, edge_index, out, out_pos, limit):
    written = 0
    for i in range(vids.shape[0]):
        v = vids[i]
        k = probe_keys[i]
        for j in range(offsets[v], offsets[v + 1]):
            if edge_keys[j] == k:
                if out_pos + written >= limit:
                    return written
                out[out_pos + written, 0] = edge_index[j]
                out[out_pos + written, 1] = probe_start + i
                written += 1
    return written


@_jit
def intersect_count(off_a, keys_a, off_b, keys_b, v0, v1):
    matches = 0
    comparisons = 0
    for v in range(v0, v1):
        for i in range(off_a[v], off_a[v + 1]):
            k = keys_a[i]
            for j in range(off_b[v], off_b[v + 1]):
                comparisons += 1
                if keys_b[j] == k:
                    matches += 1
    return matches, comparisons


@_jit
def intersect_emit(off_a, keys_a, idx_a, off_b, keys_b, idx_b, v0, v1, out, out_pos, limit):
    written = 0
    for v in range(v0, v1):
        for i in range(off_a[v], off_a[v + 1]):
            k = keys_a[i]
            for j in range(off_b[v], off_b[v + 1]):
                if keys_b[j] == k:
                    if out_pos + written >= limit:
                        return written
                    out[out_pos + written, 0] = idx_a[i]
                    out[out_pos + written, 1] = idx_b[j]
                    written += 1
    return written


@_jit
def oa_insert(keys, homes, slot_keys, slot_index):
    # slot_index < 0 marks an empty slot; every examined slot counts as a step
    cap = slot_keys.shape[0]
    steps = 0
    for i in range(keys.shape[0]):
        s = homes[i]
        while True:
            steps += 1
            if slot_index[s] < 0:
                slot_keys[s] = keys[i]
                slot_index[s] = i
                break
            s += 1
            if s == cap:
                s = 0
    return steps


@_jit
def oa_probe(probe_keys, homes, slot_keys, slot_index):
    cap = slot_keys.shape[0]
    matches = 0
    steps = 0
    for i in range(probe_keys.shape[0]):
        s = homes[i]
        k = probe_keys[i]
        for _ in range(cap):
            steps += 1
            if slot_index[s] < 0:
                break
            if slot_keys[s] == k:
                matches += 1
            s += 1
            if s == cap:
                s = 0
    return matches, steps


@_jit
def chain_insert(buckets, heads, nxt):
    for i in range(buckets.shape[0]):
        b = buckets[i]
        nxt[i] = heads[b]
        heads[b] = i
    return buckets.shape[0]


@_jit
def chain_walk(heads, nxt):
    nodes = 0
    for b in range(heads.shape[0]):
        node = heads[b]
        while node >= 0:
            nodes += 1
            node = nxt[node]
    return nodes


@_jit
def chain_probe(buckets, probe_keys, heads, nxt, node_keys):
    matches = 0
    steps = 0
    for i in range(buckets.shape[0]):
        k = probe_keys[i]
        node = heads[buckets[i]]
        while node >= 0:
            steps += 1
            if node_keys[node] == k:
                matches += 1
            node = nxt[node]
    return matches, steps


@_jit
def merge_count(a, b):
    # a and b sorted ascending; equal-key runs contribute run_a * run_b
    i = 0
    j = 0
    na = a.shape[0]
    nb = b.shape[0]
    total = 0
    while i < na and j < nb:
        if a[i] < b[j]:
            i += 1
        elif b[j] < a[i]:
            j += 1
        else:
            k = a[i]
            i0 = i
            while i < na and a[i] == k:
                i += 1
            j0 = j
            while j < nb and b[j] == k:
                j += 1
            total += (i - i0) * (j - j0)
    return total
