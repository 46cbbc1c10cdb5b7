"""Densest-k-subgraph search driven by classical or photonic sampling.

All searchers share the same shape: draw candidate vertex sets for ``steps``
rounds, score each by induced-subgraph density, and record the running best
in a :class:`RunRecord`.  The photonic variants prepare one covariance state
per (graph, k, noise) configuration through a fixed pipeline: pick the
kernel scaling targeting ``k`` clicks under the configured loss, embed the
graph, expand spectral structure if the sources are impure, then attenuate.
Samplers postselect on exactly ``k`` clicks except for :func:`raw_search`,
whose step accounting keeps discarded off-target samples visible.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .errors import EmptyDistributionError
from .graphs import Graph, SubgraphSelection, shrink_to_k
from .sampling import (
    ENUMERATION_LIMIT,
    enumerate_subspace,
    optimize_scaling,
    sample_chain,
    sample_subspace,
    vacuum_probability,
)
from .states import (
    CovarianceState,
    SchmidtProfile,
    apply_uniform_loss,
    embed_graph,
    expand_spectral,
)

__all__ = [
    "NoiseConfig",
    "RunRecord",
    "prepare_search_state",
    "random_search_uniform",
    "random_search_gbs",
    "gbs_tweak",
    "simulated_annealing",
    "raw_search",
]

#: Consecutive rejected chain draws before the target subspace is declared empty.
_REJECTION_LIMIT = 200_000


@dataclass(frozen=True)
class NoiseConfig:
    """Detector-side error model: uniform loss plus optional source impurity."""

    loss: float = 0.0
    schmidt: SchmidtProfile | None = None

    def __post_init__(self) -> None:
        if not 0.0 <= self.loss <= 1.0:
            raise ValueError(f"loss must lie in [0, 1], got {self.loss}")

    @property
    def purity(self) -> float:
        return self.schmidt.purity if self.schmidt is not None else 1.0


@dataclass(frozen=True)
class RunRecord:
    """Best-density-so-far trajectory of one search run, with provenance."""

    algorithm: str
    trajectory: tuple[float, ...]
    seed: int | None
    graph_n: int
    k: int
    noise: NoiseConfig = field(default_factory=NoiseConfig)

    def __post_init__(self) -> None:
        traj = tuple(float(v) for v in self.trajectory)
        if any(b < a - 1e-12 for a, b in zip(traj, traj[1:])):
            raise ValueError("trajectory must be monotone nondecreasing")
        if traj and (min(traj) < 0.0 or max(traj) > 1.0 + 1e-12):
            raise ValueError("densities must lie in [0, 1]")
        object.__setattr__(self, "trajectory", traj)

    @property
    def steps(self) -> int:
        return len(self.trajectory)

    @property
    def final(self) -> float:
        if not self.trajectory:
            raise ValueError("empty trajectory has no final value")
        return self.trajectory[-1]

    def rows(self) -> list[tuple]:
        """CSV rows: algorithm, seed, loss, purity, step, best_density."""
        return [
            (self.algorithm, self.seed, self.noise.loss, self.noise.purity, step, value)
            for step, value in enumerate(self.trajectory, start=1)
        ]


def _as_rng(rng) -> tuple[np.random.Generator, int | None]:
    """Accept a Generator or an integer seed; remember the seed when given."""
    if isinstance(rng, np.random.Generator):
        return rng, None
    seed = int(rng)
    return np.random.default_rng(seed), seed


def _subset_density(g: Graph, vertices) -> float:
    idx = np.fromiter(vertices, dtype=np.intp)
    k = len(idx)
    if k < 2:
        return 0.0
    edges = int(g.adjacency[np.ix_(idx, idx)].sum()) // 2
    return 2.0 * edges / (k * (k - 1))


def _validate_search_args(g: Graph, k: int, steps: int) -> None:
    if not 1 <= k <= g.n:
        raise ValueError(f"subgraph size must lie in [1, {g.n}], got {k}")
    if steps < 1:
        raise ValueError(f"step count must be positive, got {steps}")


def prepare_search_state(
    g: Graph, k: int, noise: NoiseConfig, scaling: float | None = None
) -> tuple[CovarianceState, float]:
    """State preparation pipeline shared by all photonic searchers.

    Returns the ready-to-sample state and the kernel scaling used, which is
    optimized for ``k`` clicks under the configured loss unless given.
    """
    c = optimize_scaling(g, k, noise.loss) if scaling is None else float(scaling)
    state = embed_graph(g, c)
    if noise.schmidt is not None:
        state = expand_spectral(state, noise.schmidt)
    if noise.loss > 0.0:
        state = apply_uniform_loss(state, noise.loss)
    return state, c


def random_search_uniform(g: Graph, k: int, steps: int, rng) -> RunRecord:
    """Baseline: uniform k-subsets, running max density."""
    _validate_search_args(g, k, steps)
    gen, seed = _as_rng(rng)
    best = 0.0
    trajectory = []
    for _ in range(steps):
        verts = gen.choice(g.n, size=k, replace=False)
        best = max(best, _subset_density(g, verts))
        trajectory.append(best)
    return RunRecord("uniform", tuple(trajectory), seed, g.n, k)


def _draw_k_click(state: CovarianceState, k: int, gen: np.random.Generator):
    """One postselected k-click pattern via capped rejection sampling."""
    for _ in range(_REJECTION_LIMIT):
        pattern = sample_chain(state, gen, max_clicks=k)
        if pattern is not None and pattern.count == k:
            return pattern
    raise EmptyDistributionError(
        f"no {k}-click sample accepted in {_REJECTION_LIMIT} draws; "
        "the target subspace carries (almost) no probability mass"
    )


def random_search_gbs(
    g: Graph, k: int, steps: int, noise: NoiseConfig, rng, scaling: float | None = None
) -> RunRecord:
    """Photonic random search: postselected k-click samples as candidates.

    Small graphs sample from the exactly enumerated k-click subspace; larger
    ones postselect chain-rule draws, so each recorded step is one accepted
    sample either way.  ``scaling`` skips the per-run scaling optimization
    when the caller has already computed it for this (graph, k, loss).
    """
    _validate_search_args(g, k, steps)
    gen, seed = _as_rng(rng)
    state, _ = prepare_search_state(g, k, noise, scaling)
    if g.n <= ENUMERATION_LIMIT:
        patterns = sample_subspace(enumerate_subspace(state, k), gen, steps)
    else:
        patterns = [_draw_k_click(state, k, gen) for _ in range(steps)]
    best = 0.0
    trajectory = []
    for pattern in patterns:
        best = max(best, _subset_density(g, pattern.vertices()))
        trajectory.append(best)
    return RunRecord("gbs", tuple(trajectory), seed, g.n, k, noise)


def gbs_tweak(
    state: CovarianceState, current: SubgraphSelection, rng: np.random.Generator
) -> SubgraphSelection:
    """One threshold sample on the modes outside ``current``.

    The sampled state is the marginal of ``state`` on the complement modes,
    so the returned vertices are always disjoint from ``current`` and the
    selection may be empty.
    """
    complement = current.complement()
    if not complement:
        raise ValueError("current selection leaves no modes to sample")
    pattern = sample_chain(state.marginal(complement), rng)
    clicked = tuple(complement[i] for i in pattern.vertices())
    return SubgraphSelection(clicked, current.parent_n)


def _mode_click_probs(state: CovarianceState) -> np.ndarray:
    return np.array(
        [1.0 - vacuum_probability(state, (i,)) for i in range(state.spatial_modes)]
    )


def simulated_annealing(
    g: Graph,
    k: int,
    steps: int,
    noise: NoiseConfig,
    schedule: tuple[float, float],
    rng,
    variant: str = "gbs",
    scaling: float | None = None,
) -> RunRecord:
    """Metropolis search over k-subsets with sampled exploration moves.

    Each step proposes ``S' = shrink_to_k(S U T, k)`` where the tweak ``T``
    comes from a threshold sample on the complement modes (``variant="gbs"``)
    or, for ``variant="classical"``, a uniform complement subset whose size
    is drawn to match the photonic tweak's expected size for the same
    complement.  Improvements always move; a density drop of ``d`` moves
    with probability ``exp(-d / temp)`` under geometric cooling
    ``temp = T0 * alpha^step``.  Empty tweaks consume a step and hold the
    trajectory, keeping step accounting aligned across variants.
    """
    _validate_search_args(g, k, steps)
    t0, alpha = float(schedule[0]), float(schedule[1])
    if t0 <= 0.0:
        raise ValueError(f"starting temperature must be positive, got {t0}")
    if not 0.0 < alpha < 1.0:
        raise ValueError(f"cooling factor must lie in (0, 1), got {alpha}")
    if variant not in ("gbs", "classical"):
        raise ValueError(f"unknown annealing variant {variant!r}")
    gen, seed = _as_rng(rng)
    state, _ = prepare_search_state(g, k, noise, scaling)
    click_probs = _mode_click_probs(state)

    if variant == "gbs":
        if g.n <= ENUMERATION_LIMIT:
            current = sample_subspace(enumerate_subspace(state, k), gen, 1)[0].vertices()
        else:
            current = _draw_k_click(state, k, gen).vertices()
    else:
        current = tuple(int(v) for v in gen.choice(g.n, size=k, replace=False))
    selection = SubgraphSelection(current, g.n)
    rho = _subset_density(g, selection.vertices)
    best = rho
    trajectory = []
    temp = t0
    for _ in range(steps):
        if variant == "gbs":
            tweak = gbs_tweak(state, selection, gen)
        else:
            complement = selection.complement()
            mean_size = float(np.mean(click_probs[list(complement)]))
            size = int(gen.binomial(len(complement), mean_size))
            chosen = gen.choice(len(complement), size=size, replace=False) if size else []
            tweak = SubgraphSelection(tuple(complement[i] for i in chosen), g.n)
        if len(tweak):
            union = SubgraphSelection(selection.vertices + tweak.vertices, g.n)
            candidate = shrink_to_k(g, union, k)
            rho_new = _subset_density(g, candidate.vertices)
            if rho_new >= rho or gen.random() < math.exp((rho_new - rho) / temp):
                selection, rho = candidate, rho_new
                best = max(best, rho)
        trajectory.append(best)
        temp *= alpha
    algorithm = "annealing-gbs" if variant == "gbs" else "annealing-classical"
    return RunRecord(algorithm, tuple(trajectory), seed, g.n, k, noise)


def raw_search(
    g: Graph, k: int, steps: int, noise: NoiseConfig, rng, scaling: float | None = None
) -> RunRecord:
    """Unpostselected search: every drawn sample consumes a step.

    Samples whose click count differs from ``k`` are discarded, so the
    trajectory only moves on k-click events and starts at zero.  The kernel
    scaling still targets ``k`` clicks under the configured loss, raising
    the squeezing to compensate for attenuation.
    """
    _validate_search_args(g, k, steps)
    gen, seed = _as_rng(rng)
    state, _ = prepare_search_state(g, k, noise, scaling)
    best = 0.0
    trajectory = []
    for _ in range(steps):
        pattern = sample_chain(state, gen, max_clicks=k)
        if pattern is not None and pattern.count == k:
            best = max(best, _subset_density(g, pattern.vertices()))
        trajectory.append(best)
    return RunRecord("raw", tuple(trajectory), seed, g.n, k, noise)
