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
# # Probing and joining
#
# `probe_standard` looks every key of B up in a table built on A.
# `probe_new` builds both sides over the same hash range and intersects
# matching segments.

# %%
import numpy as np

from hashgraph import BuildConfig, build_v2, probe_new, probe_standard, sort_merge_join_count

a = np.array([7, 7, 2], dtype=np.uint64)
b = np.array([7, 3, 7], dtype=np.uint64)
res = probe_standard(build_v2(a), b, materialize=True)
print(res.match_count, res.sorted_pairs().tolist())

# %%
res = probe_new(a, b, materialize=True)
print(res.match_count, res.sorted_pairs().tolist())

# %% [markdown]
# Larger inputs, checked against a sort-merge count.

# %%
rng = np.random.default_rng(1)
A = rng.integers(1, 20_000, 200_000, dtype=np.uint64)
B = rng.integers(1, 20_000, 150_000, dtype=np.uint64)
cfg = BuildConfig(load_factor=1)
print("standard  ", probe_standard(build_v2(A, cfg), B).match_count)
print("new       ", probe_new(A, B, cfg).match_count)
print("sort-merge", sort_merge_join_count(A, B))

# %%
# output is capped; the count stays exact
capped = probe_new(A, B, cfg, materialize=True, cap=1000)
print(capped.match_count, capped.pairs.shape, capped.truncated)
