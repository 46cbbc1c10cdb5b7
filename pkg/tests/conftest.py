"""Shared fixtures and small independent oracles used across the test suite."""

import itertools

import numpy as np
import pytest
from hypothesis import settings

from gbsdense.graphs import Graph, SubgraphSelection, density, induced_subgraph

settings.register_profile("suite", deadline=None, max_examples=60)
settings.load_profile("suite")


def complete_graph(n: int) -> Graph:
    adj = np.ones((n, n), dtype=np.int8)
    np.fill_diagonal(adj, 0)
    return Graph(adj)


def path_graph(n: int) -> Graph:
    return Graph.from_edges(n, [(i, i + 1) for i in range(n - 1)])


def cycle_graph(n: int) -> Graph:
    return Graph.from_edges(n, [(i, (i + 1) % n) for i in range(n)])


def brute_force_best_density(g: Graph, k: int) -> float:
    """Exhaustive densest-k-subgraph oracle; only sane for small graphs."""
    best = 0.0
    for combo in itertools.combinations(range(g.n), k):
        sub = induced_subgraph(g, SubgraphSelection(combo, g.n))
        best = max(best, density(sub))
    return best


def random_symmetric_complex(rng: np.random.Generator, n: int) -> np.ndarray:
    m = rng.standard_normal((n, n)) + 1j * rng.standard_normal((n, n))
    return (m + m.T) / 2.0


@pytest.fixture
def rng():
    return np.random.default_rng(20260816)
