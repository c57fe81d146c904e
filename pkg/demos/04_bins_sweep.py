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
# # Bin-count sweep through the CLI
#
# The benchmark harness writes CSV. Here it runs in-process and the rows
# are read back with the csv module.

# %%
import contextlib
import csv
import io

from hashgraph.bench import main

buf = io.StringIO()
with contextlib.redirect_stdout(buf):
    code = main(["bins", "--n", "65536", "--bins", "1,16,256,4096", "--mult", "1,32", "--trials", "3"])
print("exit", code)

# %%
for row in csv.DictReader(io.StringIO(buf.getvalue())):
    print(row["multiplicity"], row["bins"], row["keys_per_second"])

# %% [markdown]
# The same sweep from a shell:
#
#     python3 -m hashgraph bins --n 65536 --bins 1,16,256,4096 --mult 1,32 --out bins.csv
