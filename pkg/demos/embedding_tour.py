# %% [markdown]
# Graph-to-state embedding, end to end.
#
# A graph goes in, a Gaussian state comes out, and everything about that
# state is graph data in disguise: the kernel recovers c times the doubled
# adjacency matrix, and the squeezer bank is the adjacency spectrum through
# an arctanh. Run headless; the figure lands next to this script.

# %%
import pathlib

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt
import numpy as np

from gbsdense import (
    bloch_messiah,
    embed_graph,
    erdos_renyi,
    expected_clicks,
    hafnian,
    recover_kernel,
    williamson_pure,
)

HERE = pathlib.Path(__file__).resolve().parent

g = erdos_renyi(8, 0.5, seed=4)
lam = np.linalg.eigvalsh(g.adjacency.astype(float))
bound = 1.0 / np.max(np.abs(lam))
print(f"graph: n={g.n}, edges={int(g.adjacency.sum()) // 2}")
print(f"adjacency spectrum: {np.round(lam, 3)}")
print(f"scaling must stay below 1/lambda_max = {bound:.6f}")

# %% [markdown]
# Embed at 70% of the bound and check the roundtrip. recover_kernel undoes
# embed_graph exactly (up to float noise), so nothing about the graph is
# lost inside the covariance matrix.

# %%
c = 0.7 * bound
state = embed_graph(g, c)
a = g.adjacency.astype(float)
z = np.zeros_like(a)
doubled = c * np.block([[a, z], [z, a]])
err = np.max(np.abs(recover_kernel(state) - doubled))
print(f"c = {c:.6f}")
print(f"kernel roundtrip error: {err:.3e}")

# %% [markdown]
# The squeezers implementing this state follow tanh(r_i) = c * |lambda_i|.
# Stronger scaling means more squeezing; the bound is where the largest
# squeezer would need tanh(r) = 1, i.e. infinite energy.

# %%
factors = bloch_messiah(williamson_pure(state))
print("squeezers r_i:", np.round(factors.squeezers.values, 4))
print("tanh(r_i):    ", np.round(np.tanh(factors.squeezers.values), 4))
print("c * |lambda|: ", np.round(np.sort(c * np.abs(lam))[::-1], 4))

fractions = np.linspace(0.05, 0.98, 40)
mean_clicks = [expected_clicks(g, f * bound) for f in fractions]
mean_clicks_lossy = [expected_clicks(g, f * bound, loss=0.5) for f in fractions]

fig, ax = plt.subplots(figsize=(6, 4))
ax.plot(fractions, mean_clicks, label="ideal")
ax.plot(fractions, mean_clicks_lossy, label="half the light lost")
ax.set_xlabel("scaling c as a fraction of the bound")
ax.set_ylabel("expected clicks")
ax.set_title("click budget vs scaling")
ax.legend()
fig.tight_layout()
out = HERE / "embedding_tour.png"
fig.savefig(out, dpi=120)
print(f"figure: {out}")

# %% [markdown]
# Why any of this matters: the probability of a click pattern in the ideal
# postselected state is proportional to the squared hafnian of the kernel
# minor on the clicked vertices, and for a 0/1 adjacency minor the hafnian
# counts perfect matchings. Dense subgraphs have more matchings, so they
# are sampled more often. The densest and sparsest 4-subsets of this graph
# make the contrast concrete:

# %%
import itertools

subsets = list(itertools.combinations(range(g.n), 4))
edge_counts = [a[np.ix_(s, s)].sum() / 2 for s in subsets]
dense = subsets[int(np.argmax(edge_counts))]
sparse = subsets[int(np.argmin(edge_counts))]
for label, sub in (("densest", dense), ("sparsest", sparse)):
    minor = c * a[np.ix_(sub, sub)]
    h = hafnian(minor)
    h_check = hafnian(minor, method="enumerate")
    print(f"{label} 4-subset {sub}: haf = {h.real:.6f} "
          f"(enumerate route: {h_check.real:.6f}), weight haf^2 = {h.real**2:.3e}")
