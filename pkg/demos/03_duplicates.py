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
# # Duplicate keys
#
# Open addressing pays for every duplicate with a longer scan. The CSR
# table writes each entry once no matter how often its key repeats.

# %%
import time

import numpy as np

from hashgraph import BuildConfig, KeySpec, build_v2, empirical_multiplicity, generate, oa_build

n = 2**18
cfg = BuildConfig(load_factor=1, bin_count=2**12)

# %%
for R in (1, 2, 8, 32):
    spec = KeySpec.uniform(n, R, seed=R)
    keys = generate(spec)
    build_v2(keys, cfg)  # warm-up
    t0 = time.perf_counter()
    build_v2(keys, cfg)
    dt = time.perf_counter() - t0
    steps = oa_build(keys, 0.5).probe_steps
    print(f"R={R:2d} realized={empirical_multiplicity(keys, spec.key_range):5.2f} "
          f"csr {n / dt:10.3e} keys/s   oa steps/key {steps / n:7.2f}")
