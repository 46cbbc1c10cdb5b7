"""Config parsing, table layout and determinism of the experiment runner."""

import json
import math

import numpy as np
import pytest

from gbsdense import (
    CapacityError,
    ExperimentConfig,
    GraphSpec,
    InfeasiblePurityError,
    NoisePoint,
    ResultTable,
    run_experiment,
    save_graph,
)
from gbsdense.experiments import (
    DEFAULT_SCHEDULE,
    SCALING_COLUMNS,
    TRAJECTORY_COLUMNS,
)

from conftest import complete_graph


def base_dict(**overrides):
    raw = {
        "kind": "random-search",
        "graph": {"n": 6, "rho": 0.5, "seed": 3},
        "k": 3,
        "steps": 2,
        "iterations": 2,
        "master_seed": 11,
    }
    raw.update(overrides)
    return raw


class TestConfigParsing:
    def test_minimal_defaults(self):
        cfg = ExperimentConfig.from_dict(
            {"kind": "random-search", "graph": {"n": 6, "rho": 0.4, "seed": 1}, "k": 2}
        )
        assert cfg.steps == 1
        assert cfg.iterations == 1
        assert cfg.noise == (NoisePoint(),)
        assert cfg.master_seed == 0
        assert cfg.schedule == DEFAULT_SCHEDULE
        assert cfg.out is None

    def test_unknown_key_rejected(self):
        with pytest.raises(ValueError, match="unknown config keys"):
            ExperimentConfig.from_dict(base_dict(worker_count=4))

    def test_unknown_graph_key_rejected(self):
        with pytest.raises(ValueError, match="unknown graph spec keys"):
            ExperimentConfig.from_dict(base_dict(graph={"n": 6, "rho": 0.5, "sd": 3}))

    def test_kind_validated(self):
        with pytest.raises(ValueError, match="unknown experiment kind"):
            ExperimentConfig.from_dict(base_dict(kind="fastest"))

    def test_k_and_k_rule_are_exclusive(self):
        with pytest.raises(ValueError, match="exactly one"):
            ExperimentConfig.from_dict(base_dict(k_rule="sqrt_n"))
        raw = base_dict()
        del raw["k"]
        with pytest.raises(ValueError, match="exactly one"):
            ExperimentConfig.from_dict(raw)

    def test_unknown_k_rule(self):
        raw = base_dict(k_rule="cbrt_n")
        del raw["k"]
        with pytest.raises(ValueError, match="unknown k rule"):
            ExperimentConfig.from_dict(raw)

    def test_noise_grid_order_and_labels(self):
        raw = base_dict(
            loss=[0.0, 0.2], purity=[{"l": 2, "b": 1, "P": 0.7, "loss": 0.1}]
        )
        cfg = ExperimentConfig.from_dict(raw)
        assert [p.label for p in cfg.noise] == [
            "ideal",
            "loss=0.2",
            "loss=0.1,l=2,b=1,P=0.7",
        ]

    def test_default_noise_grid_is_ideal(self):
        cfg = ExperimentConfig.from_dict(base_dict())
        assert len(cfg.noise) == 1
        assert cfg.noise[0].label == "ideal"
        assert cfg.noise[0].to_noise().purity == 1.0

    def test_empty_noise_grid_rejected(self):
        with pytest.raises(ValueError, match="noise grid is empty"):
            ExperimentConfig.from_dict(base_dict(loss=[]))

    def test_loss_out_of_range(self):
        with pytest.raises(ValueError, match="loss"):
            ExperimentConfig.from_dict(base_dict(loss=[1.5]))

    def test_purity_entry_missing_key(self):
        with pytest.raises(ValueError, match="missing 'P'"):
            ExperimentConfig.from_dict(base_dict(purity=[{"l": 2, "b": 1}]))

    def test_purity_entry_unknown_key(self):
        with pytest.raises(ValueError, match="unknown purity entry keys"):
            ExperimentConfig.from_dict(
                base_dict(purity=[{"l": 2, "b": 1, "P": 0.7, "phi": 0.2}])
            )

    def test_infeasible_purity_fails_at_config_time(self):
        # two Schmidt levels cannot go below purity 1/2
        with pytest.raises(InfeasiblePurityError):
            ExperimentConfig.from_dict(base_dict(purity=[{"l": 2, "b": 1, "P": 0.4}]))

    def test_master_seed_nonnegative(self):
        with pytest.raises(ValueError, match="master seed"):
            ExperimentConfig.from_dict(base_dict(master_seed=-1))

    def test_schedule_parsing_and_validation(self):
        cfg = ExperimentConfig.from_dict(base_dict(schedule={"t0": 0.2, "alpha": 0.9}))
        assert cfg.schedule == (0.2, 0.9)
        with pytest.raises(ValueError, match="schedule"):
            ExperimentConfig.from_dict(base_dict(schedule={"t0": 0.2}))
        with pytest.raises(ValueError, match="schedule"):
            ExperimentConfig.from_dict(base_dict(schedule={"t0": 0.0, "alpha": 0.9}))

    def test_size_list_reserved_for_scaling(self):
        with pytest.raises(ValueError, match="only meaningful for scaling-n"):
            ExperimentConfig.from_dict(base_dict(graph={"n": [6, 9], "rho": 0.5, "seed": 3}))

    def test_scaling_kind_requires_generator(self):
        raw = base_dict(kind="scaling-n", graph={"path": "g.json"})
        with pytest.raises(ValueError, match="generated graph spec"):
            ExperimentConfig.from_dict(raw)

    def test_graph_spec_source_exclusivity(self):
        with pytest.raises(ValueError, match="exactly one"):
            GraphSpec(path="g.json", sizes=(6,), rho=0.4, seed=1)
        with pytest.raises(ValueError, match="rho and seed"):
            GraphSpec(path="g.json", rho=0.4)
        with pytest.raises(ValueError, match="need rho and seed"):
            GraphSpec(sizes=(6,))

    def test_from_json(self, tmp_path):
        raw = base_dict()
        path = tmp_path / "cfg.json"
        path.write_text(json.dumps(raw))
        assert ExperimentConfig.from_json(path) == ExperimentConfig.from_dict(raw)

    def test_from_json_malformed(self, tmp_path):
        path = tmp_path / "cfg.json"
        path.write_text("{not json")
        with pytest.raises(ValueError):
            ExperimentConfig.from_json(path)

    def test_noise_point_partial_profile_rejected(self):
        with pytest.raises(ValueError, match="given together"):
            NoisePoint(levels=2, base=1.0)


class TestResultTable:
    def test_row_width_validated(self):
        with pytest.raises(ValueError, match="width"):
            ResultTable(("a", "b"), ((1, 2, 3),))

    def test_render_formats_cells(self):
        table = ResultTable(("a", "b", "c"), ((1.0 / 3.0, 7, None),))
        assert table.render() == "a,b,c\n0.333333333333,7,\n"

    def test_render_uses_lowercase_scientific(self):
        table = ResultTable(("x",), ((1.25e-13,),))
        assert table.render() == "x\n1.25e-13\n"

    def test_comments_prefixed(self):
        table = ResultTable(("x",), (), comments=("kind = raw",))
        assert table.render().startswith("# kind = raw\nx\n")

    def test_write_csv(self, tmp_path):
        path = tmp_path / "t.csv"
        table = ResultTable(("x",), ((0.5,),), comments=("note",))
        table.write_csv(path)
        assert path.read_text() == "# note\nx\n0.5\n"

    def test_trajectory_stats(self):
        rows = [
            ("gbs", 1, 0.0, 1.0, 1, 0.2),
            ("gbs", 1, 0.0, 1.0, 2, 0.4),
            ("gbs", 2, 0.0, 1.0, 1, 0.4),
            ("gbs", 2, 0.0, 1.0, 2, 0.8),
        ]
        stats = ResultTable(TRAJECTORY_COLUMNS, tuple(rows)).trajectory_stats()
        means, variances = stats[("gbs", 0.0, 1.0)]
        assert np.allclose(means, [0.3, 0.6])
        assert np.allclose(variances, [0.01, 0.04])

    def test_trajectory_stats_needs_matching_columns(self):
        with pytest.raises(ValueError, match="trajectory-shaped"):
            ResultTable(("a",), ()).trajectory_stats()

    def test_trajectory_stats_rejects_ragged_series(self):
        rows = [
            ("gbs", 1, 0.0, 1.0, 1, 0.2),
            ("gbs", 1, 0.0, 1.0, 2, 0.4),
            ("gbs", 2, 0.0, 1.0, 1, 0.4),
        ]
        with pytest.raises(ValueError, match="ragged"):
            ResultTable(TRAJECTORY_COLUMNS, tuple(rows)).trajectory_stats()


def rows_for(table, algorithm):
    idx = table.columns.index("algorithm")
    return [r for r in table.rows if r[idx] == algorithm]


class TestRunExperiment:
    def test_complete_graph_all_stochastic_series_saturate(self, tmp_path):
        path = tmp_path / "k5.json"
        save_graph(complete_graph(5), path)
        cfg = ExperimentConfig.from_dict(
            {
                "kind": "random-search",
                "graph": {"path": str(path)},
                "k": 3,
                "steps": 1,
                "iterations": 1,
                "master_seed": 4,
            }
        )
        table = run_experiment(cfg)
        for row in table.rows:
            assert row[-1] == 1.0

    def test_row_count_contract(self):
        cfg = ExperimentConfig.from_dict(base_dict(steps=3, iterations=2))
        table = run_experiment(cfg)
        assert table.columns == TRAJECTORY_COLUMNS
        assert len(rows_for(table, "gbs")) == 6
        assert len(rows_for(table, "uniform")) == 6
        assert len(rows_for(table, "greedy")) == 3

    def test_deterministic_repeat(self):
        cfg = ExperimentConfig.from_dict(base_dict())
        assert run_experiment(cfg).render() == run_experiment(cfg).render()

    def test_worker_count_does_not_change_bytes(self):
        cfg = ExperimentConfig.from_dict(base_dict(loss=[0.0, 0.3]))
        assert run_experiment(cfg, workers=1).render() == run_experiment(cfg, workers=2).render()

    def test_appending_noise_point_preserves_existing_series(self):
        narrow = run_experiment(ExperimentConfig.from_dict(base_dict(loss=[0.0])))
        wide = run_experiment(ExperimentConfig.from_dict(base_dict(loss=[0.0, 0.3])))
        loss_idx = TRAJECTORY_COLUMNS.index("loss")
        narrow_ideal = [r for r in narrow.rows if r[loss_idx] == 0.0]
        wide_ideal = [r for r in wide.rows if r[loss_idx] == 0.0]
        assert narrow_ideal == wide_ideal

    def test_csv_written_to_out(self, tmp_path):
        out = tmp_path / "result.csv"
        cfg = ExperimentConfig.from_dict(base_dict(out=str(out)))
        table = run_experiment(cfg)
        assert out.read_text() == table.render()
        assert out.read_text().startswith("# kind = random-search\n")

    def test_echo_excludes_out_path(self, tmp_path):
        out = tmp_path / "result.csv"
        cfg = ExperimentConfig.from_dict(base_dict(out=str(out)))
        table = run_experiment(cfg)
        assert str(out) not in table.render()
        assert not any(line.startswith("out") for line in table.comments)

    def test_echo_records_scaling_per_noise_point(self):
        cfg = ExperimentConfig.from_dict(base_dict(loss=[0.0, 0.3]))
        table = run_experiment(cfg)
        assert any(line.startswith("c[noise 0] = ") for line in table.comments)
        assert any(line.startswith("c[noise 1] = ") for line in table.comments)

    def test_greedy_series_is_constant(self):
        table = run_experiment(ExperimentConfig.from_dict(base_dict(steps=4)))
        values = {row[-1] for row in rows_for(table, "greedy")}
        assert len(values) == 1

    def test_annealing_kind_series_and_echo(self):
        cfg = ExperimentConfig.from_dict(base_dict(kind="annealing", steps=4))
        table = run_experiment(cfg)
        stats = table.trajectory_stats()
        assert ("annealing-gbs", 0.0, 1.0) in stats
        assert ("annealing-classical", 0.0, 1.0) in stats
        means, variances = stats[("annealing-gbs", 0.0, 1.0)]
        assert means.shape == (4,)
        assert variances.shape == (4,)
        assert any(line.startswith("schedule = ") for line in table.comments)

    def test_raw_kind_series(self):
        table = run_experiment(ExperimentConfig.from_dict(base_dict(kind="raw", steps=3)))
        assert rows_for(table, "raw")
        assert rows_for(table, "uniform")
        assert rows_for(table, "greedy")

    def test_scaling_kind_table(self):
        cfg = ExperimentConfig.from_dict(
            {
                "kind": "scaling-n",
                "graph": {"n": [6, 9], "rho": 0.4, "seed": 7},
                "k_rule": "sqrt_n",
                "iterations": 10,
                "master_seed": 2,
            }
        )
        table = run_experiment(cfg)
        assert table.columns == SCALING_COLUMNS
        assert len(table.rows) == 2
        for row in table.rows:
            n, k = row[0], row[1]
            assert k == round(math.sqrt(n))
            mean_gbs, mean_uniform, difference = row[5], row[7], row[9]
            assert difference == mean_gbs - mean_uniform

    def test_k_rule_resolution_in_echo(self):
        raw = base_dict(graph={"n": 9, "rho": 0.5, "seed": 3}, k_rule="sqrt_n", steps=1, iterations=1)
        del raw["k"]
        table = run_experiment(ExperimentConfig.from_dict(raw))
        assert "k = 3 (rule sqrt_n)" in table.comments

    def test_distribution_kind_table(self):
        cfg = ExperimentConfig.from_dict(
            {
                "kind": "distribution",
                "graph": {"n": 6, "rho": 0.5, "seed": 3},
                "k": 2,
                "loss": [0.0, 0.4],
            }
        )
        table = run_experiment(cfg)
        assert table.columns == ("pattern", "ideal", "loss=0.4")
        assert len(table.rows) == 15  # C(6, 2)
        assert table.rows[0][0] == "110000"
        for col in (1, 2):
            assert abs(sum(row[col] for row in table.rows) - 1.0) < 1e-12

    def test_distribution_capacity_guard(self):
        cfg = ExperimentConfig.from_dict(
            {
                "kind": "distribution",
                "graph": {"n": 16, "rho": 0.4, "seed": 1},
                "k": 4,
            }
        )
        with pytest.raises(CapacityError, match="capped"):
            run_experiment(cfg)

    def test_k_out_of_range_detected_at_resolution(self):
        cfg = ExperimentConfig.from_dict(base_dict(k=10))
        with pytest.raises(ValueError, match="out of range"):
            run_experiment(cfg)

    def test_worker_count_validated(self):
        cfg = ExperimentConfig.from_dict(base_dict())
        with pytest.raises(ValueError, match="worker count"):
            run_experiment(cfg, workers=0)

    def test_impure_noise_point_runs(self):
        cfg = ExperimentConfig.from_dict(
            base_dict(steps=1, iterations=1, purity=[{"l": 2, "b": 1, "P": 0.7}])
        )
        table = run_experiment(cfg)
        purity_idx = TRAJECTORY_COLUMNS.index("purity")
        gbs_purities = {row[purity_idx] for row in rows_for(table, "gbs")}
        assert any(abs(p - 0.7) < 1e-9 for p in gbs_purities)
