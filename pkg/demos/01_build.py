# ---
# jupyter:
#   jupytext:
#     formats: py:percent
#   kernelspec:
#     display_name: Python 3
#     language: python
#     name: python3
# ---

# %% [markdown]
# # Building a table
#
# Keys go into a CSR layout: `offsets` delimits one segment per hash value
# and every input position lands in exactly one segment.

# %%
import numpy as np

from hashgraph import BuildConfig, build_v1, build_v2

keys = np.array([3, 58, 3, 10121, 907], dtype=np.uint64)
hg = build_v1(keys, BuildConfig(load_factor=0.5, hash_seed=7))
print("V =", hg.num_vertices)
print("offsets", hg.offsets)
for v in range(hg.num_vertices):
    seg = hg.vertex_entries(v)
    if len(seg):
        print(v, list(seg))

# %% [markdown]
# The binned build reorganizes the input first. The per-vertex contents are
# the same; only the order inside a segment may differ.

# %%
rng = np.random.default_rng(0)
big = rng.integers(1, 5000, 100_000, dtype=np.uint64)
cfg = BuildConfig(load_factor=2, bin_count=256)
a, b = build_v1(big, cfg), build_v2(big, cfg)
a.check_invariants()
b.check_invariants()
print("same entries:", a.same_entries(b))

# %%
# work counters from a single-threaded build
seq = BuildConfig(load_factor=2, bin_count=256, mode="sequential")
print(build_v1(big, seq).stats)
print(build_v2(big, seq).stats)
