"""Command-line interface.

Subcommands: ``gen`` (graphs), ``simulate`` (forward observations),
``solve`` (one inverse task from files), ``scenario`` (run a scenario
config), ``report`` (aggregate scenario CSVs).  Exit codes: 0 success,
2 usage/configuration errors, 1 runtime failures; errors print a single
``error: ...`` line to stderr.

Timing columns (``elapsed_ms``, ``wall_ms``) are written empty unless
``--timing`` is given, so identical seeds produce byte-identical output
files regardless of thread count.
"""

from __future__ import annotations

import argparse
import csv
import os
import sys

import numpy as np

from . import harness
from .engine import InverseTask, solve as engine_solve
from .errors import ErrorSpec
from .graphs import (GraphError, gen_binary_arborescence, gen_directed_lattice,
                     gen_forest_fire, read_graph, write_graph)
from .infection import (ModelSpec, estimate_probabilities,
                        extract_binary_observations, read_observations,
                        simulate_once, write_observations)
from .pso import SwarmConfig


class UsageError(Exception):
    """Bad arguments, configs, or input files (exit code 2)."""


def _set_threads(n):
    if n is None:
        return
    import numba
    try:
        numba.set_num_threads(n)
    except ValueError as exc:
        raise UsageError(f"invalid --threads value {n}: {exc}") from None


def _parse_tau_i(text):
    if text is None:
        return None
    if text.lower() in ("inf", "none"):
        return None
    return int(text)


def _model_from_args(args) -> ModelSpec:
    family = args.family.upper()
    defaults = {"IC": (0, 1), "SI": (0, None), "SIR": (0, None), "SEIR": (None, None)}
    if family not in defaults:
        raise UsageError(f"unknown family {args.family!r}")
    tau_e = args.tau_e if args.tau_e is not None else (defaults[family][0] or 0)
    tau_i = _parse_tau_i(args.tau_i) if args.tau_i is not None else defaults[family][1]
    if family == "SI":
        tau_i = None
    try:
        return ModelSpec(family, tau_e, tau_i, args.horizon)
    except ValueError as exc:
        raise UsageError(str(exc)) from None


def _parse_times(args) -> tuple[int, ...]:
    if args.times:
        try:
            return tuple(int(t) for t in args.times.split(","))
        except ValueError:
            raise UsageError(f"cannot parse --times {args.times!r}") from None
    if args.full_until is not None:
        return tuple(range(args.full_until + 1))
    raise UsageError("either --times or --full-until is required")


def _parse_init(args, node_count: int) -> np.ndarray:
    init = np.zeros(node_count)
    if args.init_file:
        values = []
        with open(args.init_file, "r", encoding="utf-8") as f:
            for line in f:
                if line.strip():
                    values.append(float(line))
        if len(values) != node_count:
            raise UsageError(
                f"--init-file has {len(values)} entries, graph has {node_count} nodes")
        return np.array(values)
    if args.init:
        for item in args.init.split(","):
            try:
                node, prob = item.split(":")
                init[int(node)] = float(prob)
            except (ValueError, IndexError):
                raise UsageError(f"cannot parse --init entry {item!r}") from None
        return init
    raise UsageError("either --init or --init-file is required")


def _cmd_gen(args) -> int:
    if args.generator == "tree":
        graph = gen_binary_arborescence(args.levels)
    elif args.generator == "lattice":
        graph = gen_directed_lattice(args.rows, args.cols)
    else:
        graph = gen_forest_fire(args.nodes, args.forward, args.backward, args.seed)
    write_graph(graph, args.out)
    print(f"wrote {args.out}: {graph.node_count} nodes, {graph.edge_count} edges")
    return 0


def _cmd_simulate(args) -> int:
    _set_threads(args.threads)
    graph = read_graph(args.graph)
    model = _model_from_args(args)
    times = _parse_times(args)
    init = _parse_init(args, graph.node_count)
    weights = _read_weights_file(args.weights, graph.edge_count)
    if args.kind == "real":
        obs = estimate_probabilities(graph, weights, model, init, times,
                                     num_runs=args.mc_runs, rng_seed=args.seed)
    else:
        trajectory = simulate_once(graph, weights, model, init, args.seed)
        obs = extract_binary_observations(trajectory, times)
    write_observations(obs, args.out)
    print(f"wrote {args.out}: {obs.kind} observations at {len(times)} times")
    return 0


def _read_weights_file(path, edge_count: int) -> np.ndarray:
    values = []
    with open(path, "r", encoding="utf-8") as f:
        for line in f:
            if line.strip():
                values.append(float(line))
    if len(values) != edge_count:
        raise UsageError(
            f"weights file has {len(values)} entries, graph has {edge_count} edges")
    return np.array(values)


def _write_weights_file(weights, path) -> None:
    with open(path, "w", encoding="utf-8", newline="\n") as f:
        for w in weights:
            f.write(f"{w:.17g}\n")


def _cmd_solve(args) -> int:
    _set_threads(args.threads)
    graph = read_graph(args.graph)
    reference = read_observations(args.observations)
    model = _model_from_args(args)
    error_kind = "rmse_mean" if reference.kind == "real" else "one_minus_auc_last"
    swarm = SwarmConfig(dimension=graph.edge_count, num_agents=args.agents,
                        stall_limit=args.stall, max_iterations=args.max_iter)
    task = InverseTask(graph=graph, model=model, reference=reference,
                       error=ErrorSpec(error_kind), swarm=swarm,
                       mc_runs=args.mc_runs, report_mc_runs=args.report_mc_runs,
                       accuracy_target=args.accuracy)
    solution = engine_solve(task, args.seed)
    os.makedirs(args.out_dir, exist_ok=True)
    _write_weights_file(solution.weights, os.path.join(args.out_dir, "weights.txt"))
    solution.trace.to_csv(os.path.join(args.out_dir, "trace.csv"),
                          include_timing=args.timing)
    with open(os.path.join(args.out_dir, "per_timestep.csv"), "w",
              encoding="utf-8", newline="\n") as f:
        f.write("sample_time,rmse\n")
        for t, err in zip(reference.sample_times, solution.per_timestep):
            f.write(f"{t},{err:.17g}\n")
    write_observations(solution.computed_observations,
                       os.path.join(args.out_dir, "computed_observations.txt"))
    print(f"final_error {solution.final_error:.17g} "
          f"iterations {solution.trace.total_iterations} "
          f"evaluations {solution.trace.total_evaluations}")
    return 0


def _cmd_scenario(args) -> int:
    _set_threads(args.threads)
    config = harness.read_scenario_file(args.config)
    if args.seed is not None:
        from dataclasses import replace
        config = replace(config, seed=args.seed)
    report = harness.run_scenario(config)
    os.makedirs(args.out_dir, exist_ok=True)
    harness.write_report_csv(report, os.path.join(args.out_dir, "report.csv"),
                             include_timing=args.timing)
    harness.write_timestep_csv(report, os.path.join(args.out_dir,
                                                    "timestep_errors.csv"))
    print(f"scenario {report.scenario_id}: mean_error {report.mean_error:.17g} "
          f"std {report.std_error:.17g} over {len(report.rows)} repetitions")
    return 0


def _cmd_report(args) -> int:
    rows = []
    for path in args.inputs:
        with open(path, "r", encoding="utf-8") as f:
            for row in csv.DictReader(f):
                if row["repetition"] != "mean":
                    rows.append(row)
    if not rows:
        raise UsageError("no repetition rows found in the input files")
    by_scenario: dict[str, list[float]] = {}
    for row in rows:
        by_scenario.setdefault(row["scenario_id"], []).append(float(row["final_error"]))
    with open(args.out, "w", encoding="utf-8", newline="\n") as f:
        f.write("scenario_id,repetitions,mean_error,std_error\n")
        for sid in sorted(by_scenario):
            errs = np.array(by_scenario[sid])
            std = errs.std(ddof=1) if len(errs) > 1 else 0.0
            f.write(f"{sid},{len(errs)},{errs.mean():.17g},{std:.17g}\n")
    print(f"wrote {args.out}: {len(by_scenario)} scenarios")
    return 0


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="spreadfit",
        description="Estimate per-edge transmission probabilities from "
                    "observations of a spreading process.")
    sub = parser.add_subparsers(dest="command", required=True)

    p_gen = sub.add_parser("gen", help="generate a graph file")
    gen_sub = p_gen.add_subparsers(dest="generator", required=True)
    p_tree = gen_sub.add_parser("tree", help="complete binary out-tree")
    p_tree.add_argument("--levels", type=int, required=True)
    p_lat = gen_sub.add_parser("lattice", help="directed grid")
    p_lat.add_argument("--rows", type=int, required=True)
    p_lat.add_argument("--cols", type=int, required=True)
    p_ff = gen_sub.add_parser("forest-fire", help="forest-fire growth graph")
    p_ff.add_argument("--nodes", type=int, required=True)
    p_ff.add_argument("--forward", type=float, default=0.37)
    p_ff.add_argument("--backward", type=float, default=0.32)
    p_ff.add_argument("--seed", type=int, default=0)
    for p in (p_tree, p_lat, p_ff):
        p.add_argument("--out", required=True)
        p.set_defaults(func=_cmd_gen)

    p_sim = sub.add_parser("simulate", help="forward-simulate observations")
    p_sim.add_argument("--graph", required=True)
    p_sim.add_argument("--weights", required=True,
                       help="text file, one edge weight per line")
    p_sim.add_argument("--family", required=True)
    p_sim.add_argument("--tau-e", type=int, default=None)
    p_sim.add_argument("--tau-i", default=None)
    p_sim.add_argument("--horizon", type=int, required=True)
    p_sim.add_argument("--kind", choices=("real", "binary"), default="real")
    p_sim.add_argument("--times", help="comma-separated sample times")
    p_sim.add_argument("--full-until", type=int,
                       help="observe every iteration 0..N")
    p_sim.add_argument("--init", help="node:prob pairs, e.g. '0:1,3:0.5'")
    p_sim.add_argument("--init-file", help="one per-node probability per line")
    p_sim.add_argument("--mc-runs", type=int, default=10_000)
    p_sim.add_argument("--seed", type=int, default=0)
    p_sim.add_argument("--threads", type=int, default=None)
    p_sim.add_argument("--out", required=True)
    p_sim.set_defaults(func=_cmd_simulate)

    p_solve = sub.add_parser("solve", help="run one inverse task")
    p_solve.add_argument("--graph", required=True)
    p_solve.add_argument("--observations", required=True)
    p_solve.add_argument("--family", required=True)
    p_solve.add_argument("--tau-e", type=int, default=None)
    p_solve.add_argument("--tau-i", default=None)
    p_solve.add_argument("--horizon", type=int, required=True)
    p_solve.add_argument("--mc-runs", type=int, default=1000)
    p_solve.add_argument("--report-mc-runs", type=int, default=10_000)
    p_solve.add_argument("--agents", type=int, default=150)
    p_solve.add_argument("--stall", type=int, default=50)
    p_solve.add_argument("--max-iter", type=int, default=1000)
    p_solve.add_argument("--accuracy", type=float, default=0.0)
    p_solve.add_argument("--seed", type=int, default=0)
    p_solve.add_argument("--threads", type=int, default=None)
    p_solve.add_argument("--timing", action="store_true")
    p_solve.add_argument("--out-dir", required=True)
    p_solve.set_defaults(func=_cmd_solve)

    p_scn = sub.add_parser("scenario", help="run a scenario config file")
    p_scn.add_argument("--config", required=True)
    p_scn.add_argument("--seed", type=int, default=None,
                       help="override the config's master seed")
    p_scn.add_argument("--threads", type=int, default=None)
    p_scn.add_argument("--timing", action="store_true")
    p_scn.add_argument("--out-dir", required=True)
    p_scn.set_defaults(func=_cmd_scenario)

    p_rep = sub.add_parser("report", help="aggregate scenario report CSVs")
    p_rep.add_argument("inputs", nargs="+")
    p_rep.add_argument("--out", required=True)
    p_rep.set_defaults(func=_cmd_report)
    return parser


def main(argv=None) -> int:
    parser = _build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return exc.code if isinstance(exc.code, int) else 2
    try:
        return args.func(args)
    except (UsageError, GraphError, harness.ScenarioError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except FileNotFoundError as exc:
        print(f"error: file not found: {exc.filename}", file=sys.stderr)
        return 2
    except Exception as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
