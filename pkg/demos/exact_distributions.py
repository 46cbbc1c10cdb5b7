# %% [markdown]
# Exact k-click distributions, and what noise does to them.
#
# Small states can be enumerated outright: every k-click pattern gets an
# exact probability from inclusion-exclusion over vacuum determinants. That
# makes the sampler's bias visible without any sampling noise, and it makes
# the effect of loss and spectral impurity quantitative.

# %%
import pathlib

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt
import numpy as np

from gbsdense import (
    NoiseConfig,
    enumerate_subspace,
    erdos_renyi,
    prepare_search_state,
    schmidt_profile,
)

HERE = pathlib.Path(__file__).resolve().parent

g = erdos_renyi(10, 0.4, seed=5)
k = 3


def k_click_table(noise):
    state, c = prepare_search_state(g, k, noise)
    dist = enumerate_subspace(state, k)
    dens = np.empty(len(dist.patterns))
    for i, pat in enumerate(dist.patterns):
        idx = np.fromiter(pat.vertices(), dtype=np.intp)
        dens[i] = g.adjacency[np.ix_(idx, idx)].sum() / (k * (k - 1))
    return dens, dist.weights / dist.norm, c


dens, p_ideal, c = k_click_table(NoiseConfig())
_, p_lossy, _ = k_click_table(NoiseConfig(loss=0.6))
_, p_impure, _ = k_click_table(NoiseConfig(schmidt=schmidt_profile(2, 1.0, 0.7)))
uniform = np.full_like(p_ideal, 1.0 / len(p_ideal))

print(f"instance: n={g.n}, k={k}, c={c:.6f}, patterns={len(p_ideal)}")
for name, p in (("uniform", uniform), ("ideal", p_ideal),
                ("loss 0.6", p_lossy), ("impure P=0.7", p_impure)):
    print(f"  expected density under {name:13s}: {float(dens @ p):.4f}")

# %% [markdown]
# Sorting patterns by their subgraph density shows where the enhancement
# comes from: the ideal distribution piles probability onto the dense end.
# Loss flattens that pile toward uniform; moderate impurity barely moves it.

# %%
order = np.argsort(dens)
fig, ax = plt.subplots(figsize=(7, 4))
x = np.arange(len(dens))
ax.step(x, p_ideal[order], where="mid", label="ideal")
ax.step(x, p_lossy[order], where="mid", label="loss 0.6")
ax.step(x, p_impure[order], where="mid", label="impure P=0.7")
ax.axhline(uniform[0], color="gray", ls=":", label="uniform")
ax.set_xlabel("3-subsets, sorted by density (sparse to dense)")
ax.set_ylabel("probability")
ax.set_title("exact 3-click distributions under noise")
ax.legend()
fig.tight_layout()
out = HERE / "exact_distributions.png"
fig.savefig(out, dpi=120)
print(f"figure: {out}")

# %% [markdown]
# The same machinery scores search robustness exactly. A search that keeps
# the best of 50 draws cares about the top of the distribution, not its
# mean, and that top survives noise much better:

# %%
def expected_best_of(dens, probs, draws):
    order = np.argsort(dens)
    d, w = dens[order], probs[order]
    vals, inv = np.unique(d, return_inverse=True)
    mass = np.zeros(len(vals))
    np.add.at(mass, inv, w)
    cdf = np.cumsum(mass) / mass.sum()
    top = cdf**draws
    return float(vals @ (top - np.concatenate(([0.0], top[:-1]))))


for name, p in (("ideal", p_ideal), ("loss 0.6", p_lossy), ("impure P=0.7", p_impure)):
    single = float(dens @ p)
    best50 = expected_best_of(dens, p, 50)
    print(f"{name:13s}: one draw {single:.4f}, best of 50 draws {best50:.4f}")
