"""Experiment runner: JSON config in, deterministic CSV table out.

Five experiment kinds are supported.  ``random-search``, ``annealing`` and
``raw`` produce best-density trajectories for the photonic searchers next to
a uniform (or classical-annealing) baseline and the constant greedy-peel
reference.  ``scaling-n`` sweeps graph size and reports mean single-sample
densities per size.  ``distribution`` tabulates the exact k-click subspace
distribution per noise point, one probability column each.

Determinism is the whole point of this module.  Every stochastic run gets
its own seed derived from the master seed through a ``SeedSequence`` spawn
key built from stable coordinates (algorithm, graph index, noise index,
iteration), so adding a noise point to the end of the grid never perturbs
existing series, and the worker pool can execute runs in any order without
changing a single output byte.  Aggregation folds results in fixed task
order; numbers are written with 12 significant digits.

The output CSV starts with ``#`` comment lines echoing the resolved
configuration, including the kernel scaling computed for every noise point,
so a result file is self-describing.  The output path is deliberately not
echoed: two runs of the same experiment into different files produce
identical bytes.
"""

from __future__ import annotations

import json
import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass
from typing import Mapping, Sequence

import numpy as np

from .errors import CapacityError
from .graphs import (
    Graph,
    density,
    erdos_renyi,
    greedy_peel,
    induced_subgraph,
    load_graph,
    plant_clique,
)
from .sampling import ENUMERATION_LIMIT, enumerate_subspace, optimize_scaling
from .search import (
    NoiseConfig,
    RunRecord,
    prepare_search_state,
    random_search_gbs,
    random_search_uniform,
    raw_search,
    simulated_annealing,
)
from .states import schmidt_profile

__all__ = [
    "EXPERIMENT_KINDS",
    "ExperimentConfig",
    "GraphSpec",
    "NoisePoint",
    "ResultTable",
    "run_experiment",
]

EXPERIMENT_KINDS = ("random-search", "scaling-n", "distribution", "annealing", "raw")

#: Geometric cooling defaults for the annealing kinds: (initial temperature, decay).
DEFAULT_SCHEDULE = (0.05, 0.95)

TRAJECTORY_COLUMNS = ("algorithm", "seed", "loss", "purity", "step", "best_density")
SCALING_COLUMNS = (
    "n",
    "k",
    "loss",
    "purity",
    "scaling",
    "mean_gbs",
    "var_gbs",
    "mean_uniform",
    "var_uniform",
    "quantum_minus_classical",
    "greedy",
)

# Stable per-algorithm codes used in seed spawn keys.  Append only; reusing
# or renumbering a code silently reseeds published series.
_ALGO_CODES = {
    "gbs": 0,
    "uniform": 1,
    "annealing-gbs": 3,
    "annealing-classical": 4,
    "raw": 5,
}


def _fmt(value) -> str:
    """One CSV cell: 12 significant digits for floats, plain text otherwise."""
    if value is None:
        return ""
    if isinstance(value, str):
        return value
    if isinstance(value, (int, np.integer)):
        return str(int(value))
    return f"{float(value):.12g}"


@dataclass(frozen=True)
class NoisePoint:
    """One entry of the noise grid, kept as plain numbers so it pickles cheaply.

    ``levels``/``base``/``purity`` describe a spectral impurity profile and
    must be given together; ``loss`` may accompany either form.
    """

    loss: float = 0.0
    levels: int | None = None
    base: float | None = None
    purity: float | None = None

    def __post_init__(self) -> None:
        if not 0.0 <= self.loss <= 1.0:
            raise ValueError(f"loss must lie in [0, 1], got {self.loss}")
        trio = (self.levels is None, self.base is None, self.purity is None)
        if len(set(trio)) != 1:
            raise ValueError("levels, base and purity must be given together")
        if self.levels is not None:
            # Solve the profile once now so an infeasible request fails at
            # config time, not inside a worker.
            schmidt_profile(self.levels, self.base, self.purity)

    @property
    def label(self) -> str:
        parts = []
        if self.loss > 0.0:
            parts.append(f"loss={self.loss:g}")
        if self.levels is not None:
            parts.append(f"l={self.levels},b={self.base:g},P={self.purity:g}")
        return ",".join(parts) if parts else "ideal"

    def to_noise(self) -> NoiseConfig:
        profile = (
            schmidt_profile(self.levels, self.base, self.purity)
            if self.levels is not None
            else None
        )
        return NoiseConfig(loss=self.loss, schmidt=profile)


@dataclass(frozen=True)
class GraphSpec:
    """Where the experiment graph(s) come from: a file or a seeded generator."""

    path: str | None = None
    sizes: tuple[int, ...] | None = None
    rho: float | None = None
    seed: int | None = None
    clique: tuple[int, ...] | None = None

    def __post_init__(self) -> None:
        if (self.path is None) == (self.sizes is None):
            raise ValueError("graph spec needs exactly one of a file path or a size list")
        if self.sizes is not None:
            if not self.sizes:
                raise ValueError("graph spec size list is empty")
            if self.rho is None or self.seed is None:
                raise ValueError("generated graphs need rho and seed")
        elif self.rho is not None or self.seed is not None:
            raise ValueError("rho and seed apply only to generated graphs")

    def describe(self, g: Graph) -> str:
        if self.path is not None:
            base = f"file({self.path}, n={g.n})"
        else:
            base = f"er(n={g.n}, rho={self.rho:g}, seed={self.seed})"
        if self.clique:
            base += f", clique={list(self.clique)}"
        return base


def _parse_graph_spec(raw: Mapping) -> GraphSpec:
    if not isinstance(raw, Mapping):
        raise ValueError("graph spec must be an object")
    allowed = {"path", "n", "rho", "seed", "clique"}
    unknown = set(raw) - allowed
    if unknown:
        raise ValueError(f"unknown graph spec keys: {sorted(unknown)}")
    sizes = None
    if "n" in raw:
        n = raw["n"]
        sizes = tuple(int(v) for v in n) if isinstance(n, (list, tuple)) else (int(n),)
    clique = tuple(int(v) for v in raw["clique"]) if "clique" in raw else None
    return GraphSpec(
        path=raw.get("path"),
        sizes=sizes,
        rho=float(raw["rho"]) if "rho" in raw else None,
        seed=int(raw["seed"]) if "seed" in raw else None,
        clique=clique,
    )


def _parse_noise_grid(raw: Mapping) -> tuple[NoisePoint, ...]:
    points: list[NoisePoint] = []
    if "loss" in raw:
        losses = raw["loss"]
        if not isinstance(losses, (list, tuple)):
            raise ValueError("loss must be a list of values")
        points.extend(NoisePoint(loss=float(v)) for v in losses)
    if "purity" in raw:
        specs = raw["purity"]
        if not isinstance(specs, (list, tuple)):
            raise ValueError("purity must be a list of objects")
        for spec in specs:
            if not isinstance(spec, Mapping):
                raise ValueError("each purity entry must be an object")
            unknown = set(spec) - {"l", "b", "P", "loss"}
            if unknown:
                raise ValueError(f"unknown purity entry keys: {sorted(unknown)}")
            for key in ("l", "b", "P"):
                if key not in spec:
                    raise ValueError(f"purity entry is missing {key!r}")
            points.append(
                NoisePoint(
                    loss=float(spec.get("loss", 0.0)),
                    levels=int(spec["l"]),
                    base=float(spec["b"]),
                    purity=float(spec["P"]),
                )
            )
    if "loss" not in raw and "purity" not in raw:
        return (NoisePoint(),)
    if not points:
        raise ValueError("noise grid is empty")
    return tuple(points)


@dataclass(frozen=True)
class ExperimentConfig:
    """Validated description of one experiment, independent of how it runs."""

    kind: str
    graph: GraphSpec
    k: int | None = None
    k_rule: str | None = None
    steps: int = 1
    iterations: int = 1
    noise: tuple[NoisePoint, ...] = (NoisePoint(),)
    master_seed: int = 0
    schedule: tuple[float, float] = DEFAULT_SCHEDULE
    out: str | None = None

    def __post_init__(self) -> None:
        if self.kind not in EXPERIMENT_KINDS:
            raise ValueError(f"unknown experiment kind {self.kind!r}")
        if (self.k is None) == (self.k_rule is None):
            raise ValueError("exactly one of k and k_rule is required")
        if self.k is not None and self.k < 1:
            raise ValueError(f"k must be positive, got {self.k}")
        if self.k_rule is not None and self.k_rule != "sqrt_n":
            raise ValueError(f"unknown k rule {self.k_rule!r}")
        if self.steps < 1:
            raise ValueError(f"steps must be positive, got {self.steps}")
        if self.iterations < 1:
            raise ValueError(f"iterations must be positive, got {self.iterations}")
        if not self.noise:
            raise ValueError("noise grid is empty")
        if self.master_seed < 0:
            raise ValueError(f"master seed must be nonnegative, got {self.master_seed}")
        t0, alpha = self.schedule
        if t0 <= 0.0 or not 0.0 < alpha < 1.0:
            raise ValueError(f"schedule needs t0 > 0 and 0 < alpha < 1, got {self.schedule}")
        if self.kind == "scaling-n":
            if self.graph.sizes is None:
                raise ValueError("scaling-n requires a generated graph spec with sizes")
        elif self.graph.sizes is not None and len(self.graph.sizes) > 1:
            raise ValueError("multiple graph sizes are only meaningful for scaling-n")

    @classmethod
    def from_dict(cls, raw: Mapping) -> "ExperimentConfig":
        if not isinstance(raw, Mapping):
            raise ValueError("config must be an object")
        allowed = {
            "kind",
            "graph",
            "k",
            "k_rule",
            "steps",
            "iterations",
            "loss",
            "purity",
            "master_seed",
            "schedule",
            "out",
        }
        unknown = set(raw) - allowed
        if unknown:
            raise ValueError(f"unknown config keys: {sorted(unknown)}")
        for key in ("kind", "graph"):
            if key not in raw:
                raise ValueError(f"config is missing {key!r}")
        schedule = DEFAULT_SCHEDULE
        if "schedule" in raw:
            spec = raw["schedule"]
            if not isinstance(spec, Mapping) or set(spec) != {"t0", "alpha"}:
                raise ValueError("schedule must be an object with keys t0 and alpha")
            schedule = (float(spec["t0"]), float(spec["alpha"]))
        return cls(
            kind=raw["kind"],
            graph=_parse_graph_spec(raw["graph"]),
            k=int(raw["k"]) if "k" in raw else None,
            k_rule=raw.get("k_rule"),
            steps=int(raw.get("steps", 1)),
            iterations=int(raw.get("iterations", 1)),
            noise=_parse_noise_grid(raw),
            master_seed=int(raw.get("master_seed", 0)),
            schedule=schedule,
            out=raw.get("out"),
        )

    @classmethod
    def from_json(cls, path) -> "ExperimentConfig":
        with open(path, "r", encoding="utf-8") as fh:
            raw = json.load(fh)
        return cls.from_dict(raw)


@dataclass(frozen=True)
class ResultTable:
    """Rectangular result data plus the comment header it is written with."""

    columns: tuple[str, ...]
    rows: tuple[tuple, ...]
    comments: tuple[str, ...] = ()

    def __post_init__(self) -> None:
        if not self.columns:
            raise ValueError("a result table needs at least one column")
        for row in self.rows:
            if len(row) != len(self.columns):
                raise ValueError(
                    f"row of width {len(row)} does not match {len(self.columns)} columns"
                )
        object.__setattr__(self, "rows", tuple(tuple(r) for r in self.rows))

    def render(self) -> str:
        lines = [f"# {c}" for c in self.comments]
        lines.append(",".join(self.columns))
        lines.extend(",".join(_fmt(v) for v in row) for row in self.rows)
        return "\n".join(lines) + "\n"

    def write_csv(self, path) -> None:
        with open(path, "w", encoding="utf-8", newline="") as fh:
            fh.write(self.render())

    def trajectory_stats(self) -> dict[tuple[str, float, float], tuple[np.ndarray, np.ndarray]]:
        """Per-step mean and variance over runs for each trajectory series.

        Keys are (algorithm, loss, purity); values are (means, variances)
        indexed by step - 1.  Only meaningful for tables produced by the
        trajectory kinds.
        """
        if self.columns != TRAJECTORY_COLUMNS:
            raise ValueError("trajectory statistics need trajectory-shaped columns")
        grouped: dict[tuple[str, float, float], dict[int, list[float]]] = {}
        for algorithm, _seed, loss, purity, step, value in self.rows:
            series = grouped.setdefault((algorithm, float(loss), float(purity)), {})
            series.setdefault(int(step), []).append(float(value))
        stats = {}
        for key, per_step in grouped.items():
            steps = sorted(per_step)
            if steps != list(range(1, len(steps) + 1)):
                raise ValueError(f"series {key} has non-contiguous steps")
            counts = {len(per_step[s]) for s in steps}
            if len(counts) != 1:
                raise ValueError(f"series {key} has ragged step counts")
            values = np.array([per_step[s] for s in steps], dtype=np.float64)
            stats[key] = (values.mean(axis=1), values.var(axis=1))
        return stats


def _derive_seed(master_seed: int, algorithm: str, graph_idx: int, noise_idx: int, iteration: int) -> int:
    key = (_ALGO_CODES[algorithm], graph_idx, noise_idx, iteration)
    ss = np.random.SeedSequence(entropy=master_seed, spawn_key=key)
    return int(ss.generate_state(1, np.uint64)[0])


def _run_one(task: tuple) -> RunRecord:
    """Execute a single search run.  Module-level so worker processes can import it."""
    algorithm, adj, n, k, steps, point, scaling, schedule, seed = task
    g = Graph(np.frombuffer(adj, dtype=np.int8).reshape(n, n))
    if algorithm == "uniform":
        return random_search_uniform(g, k, steps, seed)
    noise = point.to_noise()
    if algorithm == "gbs":
        return random_search_gbs(g, k, steps, noise, seed, scaling)
    if algorithm == "raw":
        return raw_search(g, k, steps, noise, seed, scaling)
    if algorithm in ("annealing-gbs", "annealing-classical"):
        variant = algorithm.removeprefix("annealing-")
        return simulated_annealing(g, k, steps, noise, schedule, seed, variant, scaling)
    raise ValueError(f"unknown algorithm {algorithm!r}")


def _execute(tasks: Sequence[tuple], workers: int) -> list[RunRecord]:
    if workers == 1 or len(tasks) <= 1:
        return [_run_one(t) for t in tasks]
    with ProcessPoolExecutor(max_workers=workers) as pool:
        chunk = max(1, len(tasks) // (workers * 4))
        return list(pool.map(_run_one, tasks, chunksize=chunk))


def _resolve_graphs(config: ExperimentConfig) -> list[tuple[Graph, int]]:
    spec = config.graph
    if spec.path is not None:
        bases = [load_graph(spec.path)]
    else:
        bases = [erdos_renyi(n, spec.rho, spec.seed) for n in spec.sizes]
    resolved = []
    for g in bases:
        if spec.clique:
            g = plant_clique(g, spec.clique)
        k = config.k if config.k is not None else round(math.sqrt(g.n))
        if not 1 <= k <= g.n:
            raise ValueError(f"k={k} is out of range for a graph on {g.n} vertices")
        resolved.append((g, k))
    return resolved


def _guard_capacity(config: ExperimentConfig, graphs: Sequence[tuple[Graph, int]]) -> None:
    if config.kind != "distribution":
        return
    for g, _k in graphs:
        if g.n > ENUMERATION_LIMIT:
            raise CapacityError(
                f"distribution experiments enumerate every pattern and are capped at "
                f"{ENUMERATION_LIMIT} vertices, got {g.n}"
            )


def _echo_lines(
    config: ExperimentConfig,
    graphs: Sequence[tuple[Graph, int]],
    scalings: Sequence[Sequence[float]],
) -> list[str]:
    lines = [f"kind = {config.kind}"]
    multi = config.kind == "scaling-n"
    if multi:
        for gi, (g, k) in enumerate(graphs):
            lines.append(f"graph[{gi}] = {config.graph.describe(g)}, k = {k}")
    else:
        g, k = graphs[0]
        lines.append(f"graph = {config.graph.describe(g)}")
        lines.append(f"k = {k}" + (" (rule sqrt_n)" if config.k_rule else ""))
    lines.append(f"steps = {config.steps}")
    lines.append(f"iterations = {config.iterations}")
    lines.append(f"master_seed = {config.master_seed}")
    if config.kind == "annealing":
        t0, alpha = config.schedule
        lines.append(f"schedule = t0={_fmt(t0)}, alpha={_fmt(alpha)}")
    for ni, point in enumerate(config.noise):
        lines.append(f"noise[{ni}] = {point.label}")
    for gi, per_noise in enumerate(scalings):
        for ni, c in enumerate(per_noise):
            where = f"graph {gi}, noise {ni}" if multi else f"noise {ni}"
            lines.append(f"c[{where}] = {_fmt(c)}")
    return lines


def _greedy_density(g: Graph, k: int) -> float:
    if k < 2:
        return 0.0
    return density(induced_subgraph(g, greedy_peel(g, k)))


def _trajectory_series(config: ExperimentConfig) -> list[tuple[str, int]]:
    """Ordered (algorithm, noise index) pairs for the trajectory kinds."""
    indices = range(len(config.noise))
    if config.kind == "random-search":
        return [("gbs", ni) for ni in indices] + [("uniform", 0)]
    if config.kind == "annealing":
        return [("annealing-gbs", ni) for ni in indices] + [
            ("annealing-classical", ni) for ni in indices
        ]
    if config.kind == "raw":
        return [("raw", ni) for ni in indices] + [("uniform", 0)]
    raise ValueError(f"{config.kind!r} is not a trajectory kind")


def _trajectory_table(
    config: ExperimentConfig,
    graphs: Sequence[tuple[Graph, int]],
    scalings: Sequence[Sequence[float]],
    workers: int,
    comments: list[str],
) -> ResultTable:
    g, k = graphs[0]
    adj = g.adjacency.tobytes()
    series = _trajectory_series(config)
    tasks = []
    for algorithm, ni in series:
        for it in range(config.iterations):
            seed = _derive_seed(config.master_seed, algorithm, 0, ni, it)
            tasks.append(
                (
                    algorithm,
                    adj,
                    g.n,
                    k,
                    config.steps,
                    config.noise[ni],
                    scalings[0][ni],
                    config.schedule,
                    seed,
                )
            )
    records = _execute(tasks, workers)
    rows: list[tuple] = []
    for record in records:
        rows.extend(record.rows())
    greedy_value = _greedy_density(g, k)
    rows.extend(
        ("greedy", None, 0.0, 1.0, step, greedy_value)
        for step in range(1, config.steps + 1)
    )
    return ResultTable(TRAJECTORY_COLUMNS, tuple(rows), tuple(comments))


def _scaling_table(
    config: ExperimentConfig,
    graphs: Sequence[tuple[Graph, int]],
    scalings: Sequence[Sequence[float]],
    workers: int,
    comments: list[str],
) -> ResultTable:
    tasks = []
    layout: list[tuple[int, int, str]] = []
    for gi, (g, k) in enumerate(graphs):
        adj = g.adjacency.tobytes()
        for ni, point in enumerate(config.noise):
            layout.append((gi, ni, "gbs"))
            for it in range(config.iterations):
                seed = _derive_seed(config.master_seed, "gbs", gi, ni, it)
                tasks.append(("gbs", adj, g.n, k, 1, point, scalings[gi][ni], None, seed))
        layout.append((gi, 0, "uniform"))
        for it in range(config.iterations):
            seed = _derive_seed(config.master_seed, "uniform", gi, 0, it)
            tasks.append(("uniform", adj, g.n, k, 1, None, None, None, seed))
    records = _execute(tasks, workers)
    finals: dict[tuple[int, int, str], np.ndarray] = {}
    for idx, key in enumerate(layout):
        block = records[idx * config.iterations : (idx + 1) * config.iterations]
        finals[key] = np.array([r.final for r in block], dtype=np.float64)
    rows = []
    for gi, (g, k) in enumerate(graphs):
        uniform = finals[(gi, 0, "uniform")]
        greedy_value = _greedy_density(g, k)
        for ni, point in enumerate(config.noise):
            gbs = finals[(gi, ni, "gbs")]
            purity = point.to_noise().purity
            rows.append(
                (
                    g.n,
                    k,
                    point.loss,
                    purity,
                    scalings[gi][ni],
                    gbs.mean(),
                    gbs.var(),
                    uniform.mean(),
                    uniform.var(),
                    gbs.mean() - uniform.mean(),
                    greedy_value,
                )
            )
    return ResultTable(SCALING_COLUMNS, tuple(rows), tuple(comments))


def _distribution_table(
    config: ExperimentConfig,
    graphs: Sequence[tuple[Graph, int]],
    scalings: Sequence[Sequence[float]],
    comments: list[str],
) -> ResultTable:
    g, k = graphs[0]
    columns = ["pattern"]
    weight_sets = []
    patterns = None
    for ni, point in enumerate(config.noise):
        state, _c = prepare_search_state(g, k, point.to_noise(), scalings[0][ni])
        dist = enumerate_subspace(state, k)
        if patterns is None:
            patterns = dist.patterns
        columns.append(point.label)
        weight_sets.append(dist.renormalized())
    rows = [
        (pattern.bitstring(), *(weights[i] for weights in weight_sets))
        for i, pattern in enumerate(patterns)
    ]
    return ResultTable(tuple(columns), tuple(rows), tuple(comments))


def run_experiment(config: ExperimentConfig, workers: int = 1) -> ResultTable:
    """Run one configured experiment and return (and optionally write) its table.

    ``workers`` only distributes the already-seeded runs over processes; any
    value produces byte-identical output.  The table is written to
    ``config.out`` when that is set.
    """
    if workers < 1:
        raise ValueError(f"worker count must be positive, got {workers}")
    graphs = _resolve_graphs(config)
    _guard_capacity(config, graphs)
    scalings = [
        [optimize_scaling(g, k, point.loss) for point in config.noise] for g, k in graphs
    ]
    comments = _echo_lines(config, graphs, scalings)
    if config.kind == "distribution":
        table = _distribution_table(config, graphs, scalings, comments)
    elif config.kind == "scaling-n":
        table = _scaling_table(config, graphs, scalings, workers, comments)
    else:
        table = _trajectory_table(config, graphs, scalings, workers, comments)
    if config.out is not None:
        table.write_csv(config.out)
    return table
