"""Simple undirected graphs and the subgraph operations used by the search code.

Graphs are stored as dense 0/1 adjacency matrices over vertices ``0..n-1``.
Density of a graph on ``n`` vertices with ``E`` edges is ``2E / (n (n-1))``.

A note on :func:`erdos_renyi`: the generator visits every *ordered* pair
``(i, j != i)`` and draws an independent uniform, adding the edge when the
draw falls below ``rho / 2``.  An unordered pair therefore gets two chances,
so the effective edge probability is ``rho - rho**2 / 4``, not ``rho``
(0.36 rather than 0.4 at ``rho = 0.4``).  This matches the generator the
experiments are calibrated against and is kept deliberately.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from typing import Iterable, Iterator, Sequence

import numpy as np

from .errors import GraphFileError

__all__ = [
    "Graph",
    "SubgraphSelection",
    "erdos_renyi",
    "density",
    "induced_subgraph",
    "plant_clique",
    "greedy_peel",
    "shrink_to_k",
    "grow_to_k",
    "save_graph",
    "load_graph",
]

#: Largest vertex count the package is sized for.  Everything downstream
#: (embedding, sampling) assumes dense linear algebra stays cheap.
MAX_VERTICES = 64


@dataclass(frozen=True, eq=False)
class Graph:
    """Simple undirected graph held as a read-only 0/1 adjacency matrix."""

    adjacency: np.ndarray

    def __post_init__(self) -> None:
        adj = np.asarray(self.adjacency)
        if adj.ndim != 2 or adj.shape[0] != adj.shape[1]:
            raise ValueError(f"adjacency must be square, got shape {adj.shape}")
        n = adj.shape[0]
        if n > MAX_VERTICES:
            raise ValueError(f"graphs are capped at {MAX_VERTICES} vertices, got {n}")
        vals = np.unique(adj)
        if not np.all(np.isin(vals, (0, 1))):
            raise ValueError("adjacency entries must be 0 or 1")
        if np.any(np.diag(adj) != 0):
            raise ValueError("self loops are not allowed")
        if np.any(adj != adj.T):
            raise ValueError("adjacency must be symmetric")
        adj = adj.astype(np.int8)
        adj.flags.writeable = False
        object.__setattr__(self, "adjacency", adj)

    @classmethod
    def from_edges(cls, n: int, edges: Iterable[tuple[int, int]]) -> "Graph":
        """Build a graph on ``n`` vertices from an iterable of vertex pairs."""
        if n < 0:
            raise ValueError(f"vertex count must be nonnegative, got {n}")
        adj = np.zeros((n, n), dtype=np.int8)
        for i, j in edges:
            if i == j:
                raise ValueError(f"self loop ({i}, {j}) is not allowed")
            if not (0 <= i < n and 0 <= j < n):
                raise ValueError(f"edge ({i}, {j}) out of range for n={n}")
            adj[i, j] = adj[j, i] = 1
        return cls(adj)

    @property
    def n(self) -> int:
        return self.adjacency.shape[0]

    @property
    def edge_count(self) -> int:
        return int(self.adjacency.sum(dtype=np.int64)) // 2

    def edges(self) -> list[tuple[int, int]]:
        """Edges as sorted ``(i, j)`` pairs with ``i < j``."""
        rows, cols = np.nonzero(np.triu(self.adjacency))
        return [(int(i), int(j)) for i, j in zip(rows, cols)]

    def degrees(self) -> np.ndarray:
        return self.adjacency.sum(axis=1, dtype=np.int64)

    def __repr__(self) -> str:
        return f"Graph(n={self.n}, edges={self.edge_count})"


@dataclass(frozen=True)
class SubgraphSelection:
    """Ordered set of distinct vertices of a parent graph on ``parent_n`` vertices."""

    vertices: tuple[int, ...]
    parent_n: int

    def __post_init__(self) -> None:
        verts = tuple(int(v) for v in self.vertices)
        if len(set(verts)) != len(verts):
            raise ValueError(f"selection contains repeated vertices: {verts}")
        if verts and (min(verts) < 0 or max(verts) >= self.parent_n):
            raise ValueError(
                f"selection {verts} out of range for parent graph on {self.parent_n} vertices"
            )
        object.__setattr__(self, "vertices", verts)

    def __len__(self) -> int:
        return len(self.vertices)

    def __iter__(self) -> Iterator[int]:
        return iter(self.vertices)

    def __contains__(self, v: int) -> bool:
        return v in self.vertices

    def as_mask(self) -> np.ndarray:
        """Boolean membership mask of length ``parent_n``."""
        mask = np.zeros(self.parent_n, dtype=bool)
        mask[list(self.vertices)] = True
        return mask

    def complement(self) -> tuple[int, ...]:
        """Vertices of the parent graph not in the selection, ascending."""
        mask = self.as_mask()
        return tuple(int(v) for v in np.nonzero(~mask)[0])


def erdos_renyi(n: int, rho: float, seed) -> Graph:
    """Random graph whose expected density is close to ``rho``.

    Every ordered pair ``(i, j != i)`` draws one uniform and contributes an
    edge when the draw is below ``rho / 2``; see the module docstring for the
    resulting ``rho - rho**2/4`` effective edge probability.

    Args:
        n: number of vertices, ``2 <= n <= 64``.
        rho: target density parameter in ``[0, 1]``.
        seed: anything accepted by ``numpy.random.default_rng``.

    Returns:
        A freshly drawn :class:`Graph`.
    """
    if not 2 <= n <= MAX_VERTICES:
        raise ValueError(f"vertex count must be in [2, {MAX_VERTICES}], got {n}")
    if not 0.0 <= rho <= 1.0:
        raise ValueError(f"density parameter must be in [0, 1], got {rho}")
    rng = np.random.default_rng(seed)
    draws = rng.random((n, n))
    hits = draws < rho / 2.0
    np.fill_diagonal(hits, False)
    return Graph((hits | hits.T).astype(np.int8))


def density(g: Graph) -> float:
    """Fraction of possible edges present: ``2 E / (n (n - 1))``."""
    if g.n < 2:
        raise ValueError(f"density is undefined for graphs with {g.n} vertex")
    return 2.0 * g.edge_count / (g.n * (g.n - 1))


def induced_subgraph(g: Graph, sel: SubgraphSelection) -> Graph:
    """Subgraph induced by ``sel``, vertices relabeled in selection order."""
    if sel.parent_n != g.n:
        raise ValueError(
            f"selection is for a graph on {sel.parent_n} vertices, got one on {g.n}"
        )
    idx = list(sel.vertices)
    return Graph(g.adjacency[np.ix_(idx, idx)])


def plant_clique(g: Graph, members: Sequence[int] | int, seed=None) -> Graph:
    """Return a copy of ``g`` with all pairs among ``members`` connected.

    ``members`` may be an explicit vertex sequence, or an integer count in
    which case that many distinct vertices are chosen uniformly using
    ``seed``.  Edges outside the clique are untouched.
    """
    if isinstance(members, (int, np.integer)):
        size = int(members)
        if not 1 <= size <= g.n:
            raise ValueError(f"clique size must be in [1, {g.n}], got {size}")
        rng = np.random.default_rng(seed)
        chosen = sorted(int(v) for v in rng.choice(g.n, size=size, replace=False))
    else:
        chosen = [int(v) for v in members]
        if len(set(chosen)) != len(chosen):
            raise ValueError(f"clique members contain repeats: {chosen}")
        if chosen and (min(chosen) < 0 or max(chosen) >= g.n):
            raise ValueError(f"clique members {chosen} out of range for n={g.n}")
    adj = np.array(g.adjacency, dtype=np.int8)
    for a in chosen:
        for b in chosen:
            if a != b:
                adj[a, b] = 1
    return Graph(adj)


def greedy_peel(g: Graph, k: int) -> SubgraphSelection:
    """Peel minimum-degree vertices until ``k`` remain.

    Degrees are recomputed within the shrinking induced subgraph after each
    removal.  Ties are broken toward the smallest vertex index.  This is the
    classic greedy baseline for dense-subgraph search.

    Returns:
        Selection of the ``k`` surviving vertices in ascending order.
    """
    if not 1 <= k <= g.n:
        raise ValueError(f"k must be in [1, {g.n}], got {k}")
    alive = list(range(g.n))
    adj = g.adjacency.astype(np.int64)
    while len(alive) > k:
        sub = adj[np.ix_(alive, alive)]
        degs = sub.sum(axis=1)
        victim = int(np.argmin(degs))  # first minimum = smallest vertex index
        alive.pop(victim)
    return SubgraphSelection(tuple(alive), g.n)


def shrink_to_k(g: Graph, sel: SubgraphSelection, k: int) -> SubgraphSelection:
    """Peel minimum-degree vertices within ``sel`` until exactly ``k`` remain.

    Degrees count edges inside the current selection only; ties go to the
    smallest vertex index.  Selection order of the survivors is preserved.
    """
    if sel.parent_n != g.n:
        raise ValueError("selection does not belong to this graph")
    if not 1 <= k <= len(sel):
        raise ValueError(f"k must be in [1, {len(sel)}], got {k}")
    alive = sorted(sel.vertices)
    adj = g.adjacency.astype(np.int64)
    while len(alive) > k:
        sub = adj[np.ix_(alive, alive)]
        degs = sub.sum(axis=1)
        victim = int(np.argmin(degs))
        alive.pop(victim)
    keep = set(alive)
    ordered = tuple(v for v in sel.vertices if v in keep)
    return SubgraphSelection(ordered, g.n)


def grow_to_k(g: Graph, sel: SubgraphSelection, k: int, rng=None) -> SubgraphSelection:
    """Grow ``sel`` to ``k`` vertices, greedily maximizing the resulting density.

    Each round appends the outside vertex with the most edges into the
    current selection (equivalently, the one maximizing the density of the
    grown selection); ties go to the smallest vertex index.  ``rng`` is
    accepted so randomized variants can share the signature and is unused
    here.
    """
    del rng
    if sel.parent_n != g.n:
        raise ValueError("selection does not belong to this graph")
    if not len(sel) <= k <= g.n:
        raise ValueError(f"k must be in [{len(sel)}, {g.n}], got {k}")
    current = list(sel.vertices)
    inside = sel.as_mask()
    adj = g.adjacency.astype(np.int64)
    while len(current) < k:
        gains = adj[:, inside].sum(axis=1)
        gains[inside] = -1  # exclude members
        pick = int(np.argmax(gains))  # first maximum = smallest vertex index
        current.append(pick)
        inside[pick] = True
    return SubgraphSelection(tuple(current), g.n)


def save_graph(g: Graph, path) -> None:
    """Write ``g`` to ``path`` as JSON: ``{"n": ..., "edges": [[i, j], ...]}``."""
    payload = {"n": g.n, "edges": [[i, j] for i, j in g.edges()]}
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(payload, fh)
        fh.write("\n")


def load_graph(path) -> Graph:
    """Read a graph written by :func:`save_graph`, validating as it goes.

    Raises:
        GraphFileError: on JSON syntax problems (with line/column), missing
            or ill-typed fields, out-of-range endpoints, or self loops.
    """
    try:
        with open(path, "r", encoding="utf-8") as fh:
            payload = json.load(fh)
    except json.JSONDecodeError as exc:
        raise GraphFileError(
            f"{path}: invalid JSON at line {exc.lineno}, column {exc.colno}: {exc.msg}"
        ) from exc
    if not isinstance(payload, dict):
        raise GraphFileError(f"{path}: top level must be an object, got {type(payload).__name__}")
    if "n" not in payload or "edges" not in payload:
        missing = {"n", "edges"} - set(payload)
        raise GraphFileError(f"{path}: missing field(s) {sorted(missing)}")
    n = payload["n"]
    if not isinstance(n, int) or isinstance(n, bool) or n < 0:
        raise GraphFileError(f"{path}: field 'n' must be a nonnegative integer, got {n!r}")
    if n > MAX_VERTICES:
        raise GraphFileError(f"{path}: n={n} exceeds the cap of {MAX_VERTICES} vertices")
    edges = payload["edges"]
    if not isinstance(edges, list):
        raise GraphFileError(f"{path}: field 'edges' must be a list")
    adj = np.zeros((n, n), dtype=np.int8)
    for pos, item in enumerate(edges):
        if (
            not isinstance(item, list)
            or len(item) != 2
            or not all(isinstance(e, int) and not isinstance(e, bool) for e in item)
        ):
            raise GraphFileError(f"{path}: edge #{pos} must be a pair of integers, got {item!r}")
        i, j = item
        if i == j:
            raise GraphFileError(f"{path}: edge #{pos} is a self loop ({i}, {j})")
        if not (0 <= i < n and 0 <= j < n):
            raise GraphFileError(f"{path}: edge #{pos} endpoint out of range for n={n}: ({i}, {j})")
        adj[i, j] = adj[j, i] = 1
    return Graph(adj)
