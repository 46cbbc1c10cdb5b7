"""Search algorithms: baselines, photonic random search, annealing, raw runs."""

import itertools
import math

import numpy as np
import pytest

from conftest import brute_force_best_density, complete_graph

from gbsdense import (
    EmptyDistributionError,
    Graph,
    SubgraphSelection,
    click_count_mass,
    density,
    embed_graph,
    enumerate_subspace,
    erdos_renyi,
    gbs_tweak,
    greedy_peel,
    induced_subgraph,
    prepare_search_state,
    random_search_gbs,
    random_search_uniform,
    raw_search,
    schmidt_profile,
    simulated_annealing,
)
from gbsdense.search import NoiseConfig, RunRecord


def edgeless(n):
    return Graph(np.zeros((n, n), dtype=np.int8))


class TestNoiseConfig:
    def test_defaults(self):
        cfg = NoiseConfig()
        assert cfg.loss == 0.0
        assert cfg.schmidt is None
        assert cfg.purity == 1.0

    def test_purity_from_profile(self):
        cfg = NoiseConfig(loss=0.2, schmidt=schmidt_profile(2, 1.0, 0.68))
        assert cfg.purity == pytest.approx(0.68)

    def test_loss_range(self):
        with pytest.raises(ValueError, match="loss"):
            NoiseConfig(loss=1.2)


class TestRunRecord:
    def test_rows_shape(self):
        rec = RunRecord("uniform", (0.2, 0.5, 0.5), seed=7, graph_n=6, k=3)
        rows = rec.rows()
        assert rows[0] == ("uniform", 7, 0.0, 1.0, 1, 0.2)
        assert rows[-1] == ("uniform", 7, 0.0, 1.0, 3, 0.5)
        assert rec.final == 0.5
        assert rec.steps == 3

    def test_rejects_decreasing(self):
        with pytest.raises(ValueError, match="monotone"):
            RunRecord("uniform", (0.5, 0.4), seed=None, graph_n=6, k=3)

    def test_rejects_out_of_range(self):
        with pytest.raises(ValueError, match="0, 1"):
            RunRecord("uniform", (0.5, 1.4), seed=None, graph_n=6, k=3)


class TestPrepareState:
    def test_pure_ideal(self):
        g = erdos_renyi(8, 0.5, seed=1)
        state, c = prepare_search_state(g, 3, NoiseConfig())
        assert state.spatial_modes == 8
        assert state.spectral_modes == 1
        assert state.is_pure()
        assert 0.0 < c

    def test_explicit_scaling_passthrough(self):
        g = erdos_renyi(8, 0.5, seed=1)
        state, c = prepare_search_state(g, 3, NoiseConfig(), scaling=0.1)
        assert c == 0.1

    def test_impurity_expands_spectral_modes(self):
        g = erdos_renyi(6, 0.5, seed=2)
        profile = schmidt_profile(3, 1.0, 0.6)
        state, _ = prepare_search_state(g, 2, NoiseConfig(schmidt=profile))
        assert state.spectral_modes == 3

    def test_loss_breaks_purity(self):
        g = erdos_renyi(6, 0.5, seed=3)
        state, _ = prepare_search_state(g, 2, NoiseConfig(loss=0.4))
        assert not state.is_pure()


class TestRandomSearchUniform:
    def test_complete_graph_saturates(self):
        rec = random_search_uniform(complete_graph(5), 3, 10, rng=0)
        assert rec.trajectory == tuple([1.0] * 10)

    def test_edgeless_stays_zero(self):
        rec = random_search_uniform(edgeless(6), 3, 5, rng=0)
        assert rec.trajectory == tuple([0.0] * 5)

    def test_deterministic(self):
        g = erdos_renyi(10, 0.4, seed=4)
        a = random_search_uniform(g, 3, 50, rng=123)
        b = random_search_uniform(g, 3, 50, rng=123)
        assert a == b
        assert a.seed == 123

    def test_saturates_to_brute_force(self):
        g = erdos_renyi(10, 0.4, seed=5)
        best = brute_force_best_density(g, 3)
        rec = random_search_uniform(g, 3, 10_000, rng=6)
        assert rec.final == pytest.approx(best)

    def test_never_exceeds_brute_force(self):
        g = erdos_renyi(9, 0.5, seed=7)
        best = brute_force_best_density(g, 4)
        rec = random_search_uniform(g, 4, 500, rng=8)
        assert rec.final <= best + 1e-12

    def test_validates(self):
        g = complete_graph(4)
        with pytest.raises(ValueError):
            random_search_uniform(g, 0, 5, rng=0)
        with pytest.raises(ValueError):
            random_search_uniform(g, 3, 0, rng=0)


class TestRandomSearchGbs:
    def test_complete_graph_saturates(self):
        rec = random_search_gbs(complete_graph(5), 3, 5, NoiseConfig(), rng=0)
        assert rec.trajectory == tuple([1.0] * 5)
        assert rec.algorithm == "gbs"

    def test_deterministic(self):
        g = erdos_renyi(10, 0.4, seed=9)
        a = random_search_gbs(g, 3, 30, NoiseConfig(loss=0.2), rng=11)
        b = random_search_gbs(g, 3, 30, NoiseConfig(loss=0.2), rng=11)
        assert a == b

    def test_monotone_and_bounded(self):
        g = erdos_renyi(10, 0.4, seed=10)
        rec = random_search_gbs(g, 3, 100, NoiseConfig(), rng=12)
        assert all(b >= a for a, b in zip(rec.trajectory, rec.trajectory[1:]))
        assert rec.final <= brute_force_best_density(g, 3) + 1e-12

    def test_impure_noise_accepted(self):
        g = erdos_renyi(8, 0.5, seed=11)
        noise = NoiseConfig(loss=0.3, schmidt=schmidt_profile(2, 1.0, 0.7))
        rec = random_search_gbs(g, 3, 10, noise, rng=13)
        assert rec.steps == 10
        assert rec.noise == noise

    def test_empty_subspace_raises(self):
        with pytest.warns(UserWarning, match="unattainable"):
            with pytest.raises(EmptyDistributionError):
                random_search_gbs(edgeless(6), 2, 5, NoiseConfig(), rng=0)

    def test_large_graph_rejection_path(self):
        g = erdos_renyi(16, 0.4, seed=12)
        rec = random_search_gbs(g, 4, 5, NoiseConfig(), rng=14)
        assert rec.steps == 5
        assert all(0.0 <= v <= 1.0 for v in rec.trajectory)

    def test_beats_uniform_in_expectation(self):
        # exact single-sample expected densities, no sampling noise
        g = erdos_renyi(10, 0.4, seed=13)
        k = 3
        state, _ = prepare_search_state(g, k, NoiseConfig())
        dist = enumerate_subspace(state, k)
        weights = dist.renormalized()
        gbs_expect = sum(
            w * density(induced_subgraph(g, SubgraphSelection(p.vertices(), g.n)))
            for p, w in zip(dist.patterns, weights)
        )
        uniform_expect = np.mean(
            [
                density(induced_subgraph(g, SubgraphSelection(c, g.n)))
                for c in itertools.combinations(range(g.n), k)
            ]
        )
        assert gbs_expect > uniform_expect


class TestGbsTweak:
    def test_disjoint_from_current(self):
        g = erdos_renyi(8, 0.5, seed=14)
        state, _ = prepare_search_state(g, 4, NoiseConfig())
        current = SubgraphSelection((0, 2, 5, 7), g.n)
        rng = np.random.default_rng(3)
        for _ in range(50):
            tweak = gbs_tweak(state, current, rng)
            assert set(tweak.vertices).isdisjoint(current.vertices)
            assert tweak.parent_n == g.n

    def test_vacuum_state_gives_empty(self):
        state = embed_graph(edgeless(6), 0.3)
        tweak = gbs_tweak(state, SubgraphSelection((0, 1), 6), np.random.default_rng(0))
        assert len(tweak) == 0

    def test_full_selection_rejected(self):
        g = complete_graph(4)
        state, _ = prepare_search_state(g, 2, NoiseConfig())
        with pytest.raises(ValueError, match="no modes"):
            gbs_tweak(state, SubgraphSelection((0, 1, 2, 3), 4), np.random.default_rng(0))


class TestSimulatedAnnealing:
    def test_complete_graph_instant(self):
        rec = simulated_annealing(complete_graph(6), 3, 4, NoiseConfig(), (0.05, 0.95), rng=0)
        assert rec.trajectory == tuple([1.0] * 4)
        assert rec.algorithm == "annealing-gbs"

    def test_deterministic(self):
        g = erdos_renyi(10, 0.4, seed=15)
        args = (g, 3, 25, NoiseConfig(loss=0.1), (0.05, 0.95))
        assert simulated_annealing(*args, rng=5) == simulated_annealing(*args, rng=5)

    def test_classical_variant(self):
        g = erdos_renyi(10, 0.4, seed=16)
        rec = simulated_annealing(
            g, 3, 20, NoiseConfig(), (0.05, 0.95), rng=6, variant="classical"
        )
        assert rec.algorithm == "annealing-classical"
        assert rec.steps == 20

    def test_bounded_by_brute_force(self):
        g = erdos_renyi(10, 0.4, seed=17)
        best = brute_force_best_density(g, 4)
        rec = simulated_annealing(g, 4, 60, NoiseConfig(), (0.05, 0.95), rng=7)
        assert rec.final <= best + 1e-12

    def test_improves_or_holds_from_start(self):
        g = erdos_renyi(12, 0.4, seed=18)
        rec = simulated_annealing(g, 4, 40, NoiseConfig(), (0.05, 0.95), rng=8)
        assert rec.trajectory[-1] >= rec.trajectory[0]

    def test_validates_schedule_and_variant(self):
        g = complete_graph(5)
        with pytest.raises(ValueError, match="temperature"):
            simulated_annealing(g, 3, 5, NoiseConfig(), (0.0, 0.95), rng=0)
        with pytest.raises(ValueError, match="cooling"):
            simulated_annealing(g, 3, 5, NoiseConfig(), (0.05, 1.0), rng=0)
        with pytest.raises(ValueError, match="variant"):
            simulated_annealing(g, 3, 5, NoiseConfig(), (0.05, 0.95), rng=0, variant="x")


class TestRawSearch:
    def test_starts_at_zero_and_holds(self):
        g = erdos_renyi(9, 0.4, seed=19)
        rec = raw_search(g, 3, 40, NoiseConfig(), rng=9)
        assert rec.algorithm == "raw"
        assert rec.steps == 40
        assert rec.trajectory[0] in (0.0,) or rec.trajectory[0] > 0.0  # first step may hit
        assert all(b >= a for a, b in zip(rec.trajectory, rec.trajectory[1:]))

    def test_complete_graph_hits_one_on_first_k_click(self):
        rec = raw_search(complete_graph(5), 3, 60, NoiseConfig(), rng=10)
        nonzero = [v for v in rec.trajectory if v > 0.0]
        assert nonzero and all(v == 1.0 for v in nonzero)

    def test_retention_matches_exact_mass(self):
        g = erdos_renyi(7, 0.5, seed=20)
        k = 3
        state, _ = prepare_search_state(g, k, NoiseConfig())
        mass = click_count_mass(state, k)
        steps = 4000
        rec = raw_search(g, k, steps, NoiseConfig(), rng=11)
        gen = np.random.default_rng(11)
        hits = 0
        from gbsdense import sample_chain

        for _ in range(steps):
            pat = sample_chain(state, gen, max_clicks=k)
            if pat is not None and pat.count == k:
                hits += 1
        sigma = math.sqrt(mass * (1.0 - mass) / steps)
        assert abs(hits / steps - mass) < 3.0 * sigma + 1e-9

    def test_deterministic(self):
        g = erdos_renyi(9, 0.4, seed=21)
        assert raw_search(g, 3, 30, NoiseConfig(), rng=12) == raw_search(
            g, 3, 30, NoiseConfig(), rng=12
        )


class TestCrossAlgorithm:
    def test_all_respect_brute_force_bound(self):
        g = erdos_renyi(9, 0.5, seed=22)
        k = 3
        best = brute_force_best_density(g, k)
        noise = NoiseConfig(loss=0.2)
        records = [
            random_search_uniform(g, k, 80, rng=31),
            random_search_gbs(g, k, 80, noise, rng=32),
            simulated_annealing(g, k, 80, noise, (0.05, 0.95), rng=33),
            raw_search(g, k, 80, noise, rng=34),
        ]
        for rec in records:
            assert rec.final <= best + 1e-12

    def test_greedy_baseline_available(self):
        g = erdos_renyi(12, 0.4, seed=23)
        sel = greedy_peel(g, 4)
        assert density(induced_subgraph(g, sel)) <= brute_force_best_density(g, 4) + 1e-12
