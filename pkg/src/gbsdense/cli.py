"""Command line front end.

Five subcommands cover the workflow end to end: ``gen`` writes a random
graph file, ``embed`` reports the kernel scaling bound and per-mode squeezer
values for a graph, ``dist`` writes an exact k-click subspace distribution
as CSV, ``run`` executes an experiment from a JSON config file, and
``greedy`` prints the deterministic baseline density.

Exit codes: 0 on success; 1 for configuration problems (bad flags, missing
or malformed input files, out-of-range parameters); 2 for runtime failures
(sampling from an empty distribution, output I/O errors).
"""

from __future__ import annotations

import argparse
import sys

import numpy as np

from .experiments import ExperimentConfig, run_experiment
from .graphs import (
    density,
    erdos_renyi,
    greedy_peel,
    induced_subgraph,
    load_graph,
    plant_clique,
    save_graph,
)
from .sampling import enumerate_subspace, optimize_scaling
from .search import NoiseConfig, prepare_search_state
from .states import embed_graph, schmidt_profile

__all__ = ["main"]


def _cmd_gen(args) -> int:
    g = erdos_renyi(args.n, args.rho, args.seed)
    if args.clique:
        g = plant_clique(g, args.clique)
    save_graph(g, args.out)
    summary = f"wrote {args.out}: n={g.n}, edges={g.edge_count}"
    if g.n >= 2:
        summary += f", density={density(g):.12g}"
    print(summary)
    return 0


def _cmd_embed(args) -> int:
    g = load_graph(args.graph)
    eigs = np.linalg.eigvalsh(g.adjacency.astype(np.float64))
    spectral = float(np.max(np.abs(eigs)))
    bound = 1.0 / spectral if spectral > 0.0 else np.inf
    c = optimize_scaling(g, args.k, args.loss) if args.k is not None else float(args.c)
    embed_graph(g, c)  # validates c against the bound
    squeezers = np.sort(c * np.abs(eigs))[::-1]
    print(f"c = {c:.12g}")
    print(f"bound = {bound:.12g}")
    print("t = " + ", ".join(f"{t:.12g}" for t in squeezers))
    return 0


def _cmd_dist(args) -> int:
    g = load_graph(args.graph)
    profile = None
    if args.schmidt is not None:
        levels, base, purity = args.schmidt
        profile = schmidt_profile(int(levels), base, purity)
    noise = NoiseConfig(loss=args.loss, schmidt=profile)
    state, _c = prepare_search_state(g, args.k, noise, args.c)
    dist = enumerate_subspace(state, args.k)
    dist.write_csv(args.out)
    print(f"wrote {args.out}: {len(dist.patterns)} patterns, subspace mass {dist.norm:.12g}")
    return 0


def _cmd_run(args) -> int:
    config = ExperimentConfig.from_json(args.config)
    table = run_experiment(config, workers=args.workers)
    if config.out is not None:
        print(f"wrote {config.out}: {len(table.rows)} rows")
    else:
        sys.stdout.write(table.render())
    return 0


def _cmd_greedy(args) -> int:
    g = load_graph(args.graph)
    value = 0.0
    if args.k >= 2:
        value = density(induced_subgraph(g, greedy_peel(g, args.k)))
    else:
        greedy_peel(g, args.k)  # still validates k
    print(f"{value:.12g}")
    return 0


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="gbsdense",
        description="Dense-subgraph search on a photonic threshold sampler.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    gen = sub.add_parser("gen", help="generate a random graph file")
    gen.add_argument("--n", type=int, required=True, help="vertex count")
    gen.add_argument("--rho", type=float, required=True, help="target density")
    gen.add_argument("--seed", type=int, required=True, help="generator seed")
    gen.add_argument("--out", required=True, help="output graph file")
    gen.add_argument(
        "--clique", type=int, nargs="+", metavar="V", help="vertices to connect into a clique"
    )
    gen.set_defaults(func=_cmd_gen)

    embed = sub.add_parser("embed", help="report scaling bound and squeezer values")
    embed.add_argument("--graph", required=True, help="graph file")
    pick = embed.add_mutually_exclusive_group(required=True)
    pick.add_argument("--c", type=float, help="kernel scaling to inspect")
    pick.add_argument("--k", type=int, help="optimize scaling for this click count")
    embed.add_argument(
        "--loss", type=float, default=0.0, help="uniform loss assumed when optimizing (with --k)"
    )
    embed.set_defaults(func=_cmd_embed)

    dist = sub.add_parser("dist", help="write the exact k-click subspace distribution")
    dist.add_argument("--graph", required=True, help="graph file")
    dist.add_argument("--k", type=int, required=True, help="click count of the subspace")
    dist.add_argument(
        "--c", type=float, default=None, help="kernel scaling (optimized for k when omitted)"
    )
    dist.add_argument("--loss", type=float, default=0.0, help="uniform photon loss")
    dist.add_argument(
        "--schmidt",
        type=float,
        nargs=3,
        metavar=("L", "B", "P"),
        help="spectral impurity profile: level count, geometric base, target purity",
    )
    dist.add_argument("--out", required=True, help="output CSV file")
    dist.set_defaults(func=_cmd_dist)

    run = sub.add_parser("run", help="run an experiment from a JSON config file")
    run.add_argument("--config", required=True, help="experiment config file")
    run.add_argument("--workers", type=int, default=1, help="worker process count")
    run.set_defaults(func=_cmd_run)

    greedy = sub.add_parser("greedy", help="print the greedy-peel baseline density")
    greedy.add_argument("--graph", required=True, help="graph file")
    greedy.add_argument("--k", type=int, required=True, help="subgraph size")
    greedy.set_defaults(func=_cmd_greedy)

    return parser


def main(argv=None) -> int:
    parser = _build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return 0 if exc.code in (0, None) else 1
    try:
        return args.func(args)
    except (ValueError, FileNotFoundError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    except (RuntimeError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
