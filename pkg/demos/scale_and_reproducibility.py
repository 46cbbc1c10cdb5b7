# %% [markdown]
# Beyond enumeration: the chain sampler, and reproducible sweeps.
#
# Exact enumeration stops at 14 spatial modes. Larger states are sampled
# mode by mode through conditional covariances; the draws below come from a
# 24-vertex instance that no enumeration could touch (C(24,8) patterns times
# inclusion-exclusion would be astronomically many determinants).

# %%
import time

import numpy as np

from gbsdense import NoiseConfig, erdos_renyi, prepare_search_state, sample_chain

g = erdos_renyi(24, 0.4, seed=65)
state, c = prepare_search_state(g, 8, NoiseConfig())
rng = np.random.default_rng(0)

t0 = time.time()
kept = []
attempts = 0
while len(kept) < 40:
    attempts += 1
    pattern = sample_chain(state, rng, max_clicks=8)
    if pattern is not None and len(pattern.vertices()) == 8:
        idx = np.fromiter(pattern.vertices(), dtype=np.intp)
        kept.append(g.adjacency[np.ix_(idx, idx)].sum() / 56.0)
elapsed = time.time() - t0

print(f"n=24, k=8, c={c:.6f}")
print(f"40 accepted patterns from {attempts} chain draws in {elapsed:.1f}s")
print(f"densities: min {min(kept):.3f}, mean {np.mean(kept):.3f}, max {max(kept):.3f}")
print(f"(uniform 8-subsets of this graph average 0.36 on the same metric)")

# %% [markdown]
# Sweeps are reproducible down to the byte. Every (algorithm, noise point,
# iteration) gets its own seed derived from the master seed by stable
# hashing, so the worker count cannot change any number, and adding a noise
# point later cannot disturb the series already computed.

# %%
import tempfile
import pathlib

from gbsdense import ExperimentConfig, run_experiment

tmp = pathlib.Path(tempfile.mkdtemp())
settings = {
    "kind": "scaling-n",
    "graph": {"n": [9, 16], "rho": 0.4, "seed": 5},
    "k_rule": "sqrt_n",
    "steps": 1,
    "iterations": 60,
    "master_seed": 11,
}

run_experiment(
    ExperimentConfig.from_dict({**settings, "out": str(tmp / "serial.csv")}), workers=1
)
run_experiment(
    ExperimentConfig.from_dict({**settings, "out": str(tmp / "pooled.csv")}), workers=4
)
serial = (tmp / "serial.csv").read_bytes()
pooled = (tmp / "pooled.csv").read_bytes()
print(f"1 worker vs 4 workers: {'identical' if serial == pooled else 'DIFFER'} "
      f"({len(serial)} bytes)")
print()
print((tmp / "serial.csv").read_text(), end="")
