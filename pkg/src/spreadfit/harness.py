"""Scenario runner: generate a task, solve it repeatedly, aggregate.

A scenario fixes a graph source, a transmission model, how reference
weights and initially infected nodes are drawn, the observation schedule
and kind, and solver settings.  Each repetition draws fresh reference
weights and seeds, produces reference observations, discards the weights,
and runs the inverse solver; the report keeps per-repetition metrics plus
their mean and standard deviation.

Scenario files are flat ``key value`` text (one pair per line, ``#``
comments allowed).  Keys mirror :class:`ScenarioConfig` fields; see
``demos/scenario_small.cfg`` for a worked example.
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass, fields
from typing import Optional

import numpy as np

from ._rng import derive
from .engine import InverseTask, solve
from .errors import ErrorSpec
from .graphs import (Graph, gen_binary_arborescence, gen_directed_lattice,
                     gen_forest_fire, read_graph)
from .infection import (ModelSpec, ObservationSet, estimate_probabilities,
                        extract_binary_observations, simulate_once)
from .pso import SwarmConfig

# seed-derivation tags (per repetition)
_WEIGHTS, _INIT, _REFERENCE, _SOLVE, _GRAPH = 11, 12, 13, 14, 15


class ScenarioError(ValueError):
    """Invalid scenario configuration."""


class ScenarioVarianceError(RuntimeError):
    """Across-repetition spread is implausibly large for the scenario."""


@dataclass(frozen=True)
class ScenarioConfig:
    scenario_id: str
    graph_kind: str                      # tree | lattice | forest_fire | file
    family: str                          # IC | SI | SIR | SEIR
    horizon: int
    init_fraction: float
    weight_upper: float
    schedule: str = "two_point"          # two_point | full
    kind: str = "real"                   # real | binary
    tau_e: int = 0
    tau_i: Optional[int] = 1             # None for SI
    seed_prob_low: float = 0.0
    seed_prob_high: float = 0.5
    repetitions: int = 10
    seed: int = 0
    agents: int = 150
    stall: int = 50
    max_iterations: int = 1000
    mc_runs: int = 1000
    report_mc_runs: int = 10_000
    observation_time: Optional[int] = None   # explicit last sample time
    graph_levels: Optional[int] = None
    graph_rows: Optional[int] = None
    graph_cols: Optional[int] = None
    graph_nodes: Optional[int] = None
    graph_forward: float = 0.37
    graph_backward: float = 0.32
    graph_seed: Optional[int] = None
    graph_path: Optional[str] = None
    variance_warn_ratio: float = 0.10
    variance_fail_ratio: float = 0.25

    def __post_init__(self):
        if self.graph_kind not in ("tree", "lattice", "forest_fire", "file"):
            raise ScenarioError(f"unknown graph_kind {self.graph_kind!r}")
        if self.schedule not in ("two_point", "full"):
            raise ScenarioError(f"unknown schedule {self.schedule!r}")
        if self.kind not in ("real", "binary"):
            raise ScenarioError(f"unknown observation kind {self.kind!r}")
        if not (0.0 < self.init_fraction <= 1.0):
            raise ScenarioError("init_fraction must be in (0, 1]")
        if not (0.0 <= self.weight_upper <= 1.0):
            raise ScenarioError("weight_upper must be in [0, 1]")
        if not (0.0 <= self.seed_prob_low <= self.seed_prob_high <= 1.0):
            raise ScenarioError("seed probability range must satisfy 0 <= low <= high <= 1")
        if self.repetitions < 1:
            raise ScenarioError("repetitions must be >= 1")


@dataclass(frozen=True)
class RepetitionResult:
    repetition: int
    final_error: float
    iterations: int
    evaluations: int
    wall_ms: float
    per_timestep: tuple[float, ...]
    sample_times: tuple[int, ...]


@dataclass(frozen=True)
class ScenarioReport:
    scenario_id: str
    rows: tuple[RepetitionResult, ...]
    mean_error: float
    std_error: float
    mean_iterations: float
    mean_evaluations: float
    mean_wall_ms: float


def build_scenario_graph(config: ScenarioConfig) -> Graph:
    if config.graph_kind == "tree":
        if config.graph_levels is None:
            raise ScenarioError("tree graphs need graph_levels")
        return gen_binary_arborescence(config.graph_levels)
    if config.graph_kind == "lattice":
        if config.graph_rows is None or config.graph_cols is None:
            raise ScenarioError("lattice graphs need graph_rows and graph_cols")
        return gen_directed_lattice(config.graph_rows, config.graph_cols)
    if config.graph_kind == "forest_fire":
        if config.graph_nodes is None:
            raise ScenarioError("forest_fire graphs need graph_nodes")
        gseed = config.graph_seed if config.graph_seed is not None \
            else derive(config.seed, _GRAPH)
        return gen_forest_fire(config.graph_nodes, config.graph_forward,
                               config.graph_backward, gseed)
    if config.graph_path is None:
        raise ScenarioError("file graphs need graph_path")
    return read_graph(config.graph_path)


def scenario_model(config: ScenarioConfig) -> ModelSpec:
    return ModelSpec(config.family, config.tau_e, config.tau_i, config.horizon)


def _draw_reference(config: ScenarioConfig, graph: Graph, rep: int):
    """Reference weights and initial condition for one repetition."""
    w_rng = np.random.default_rng(derive(config.seed, _WEIGHTS, rep))
    weights = w_rng.uniform(0.0, config.weight_upper, graph.edge_count)
    i_rng = np.random.default_rng(derive(config.seed, _INIT, rep))
    n_seeds = max(1, round(config.init_fraction * graph.node_count))
    nodes = i_rng.choice(graph.node_count, size=n_seeds, replace=False)
    init = np.zeros(graph.node_count)
    if config.kind == "binary":
        init[nodes] = 1.0
    else:
        init[nodes] = i_rng.uniform(config.seed_prob_low, config.seed_prob_high,
                                    n_seeds)
    return weights, init


def _sample_times(config: ScenarioConfig, t_last: int) -> tuple[int, ...]:
    t_last = max(1, t_last)
    if config.schedule == "two_point":
        return (0, t_last)
    return tuple(range(t_last + 1))


def _reference_observations(config: ScenarioConfig, graph: Graph,
                            model: ModelSpec, weights, init, rep: int):
    ref_seed = derive(config.seed, _REFERENCE, rep)
    if config.kind == "real":
        t_last = config.observation_time if config.observation_time is not None \
            else model.horizon
        times = _sample_times(config, t_last)
        return estimate_probabilities(graph, weights, model, init, times,
                                      num_runs=config.report_mc_runs,
                                      rng_seed=ref_seed)
    trajectory = simulate_once(graph, weights, model, init, ref_seed)
    finite = trajectory.infection_times[trajectory.infection_times >= 0]
    t_last = config.observation_time if config.observation_time is not None \
        else int(finite.max(initial=0))
    return extract_binary_observations(trajectory, _sample_times(config, t_last))


def build_task(config: ScenarioConfig, graph: Graph, reference: ObservationSet) -> InverseTask:
    error_kind = "rmse_mean" if config.kind == "real" else "one_minus_auc_last"
    swarm = SwarmConfig(dimension=graph.edge_count, num_agents=config.agents,
                        stall_limit=config.stall,
                        max_iterations=config.max_iterations)
    return InverseTask(graph=graph, model=scenario_model(config),
                       reference=reference, error=ErrorSpec(error_kind),
                       swarm=swarm, mc_runs=config.mc_runs,
                       report_mc_runs=config.report_mc_runs)


def run_scenario(config: ScenarioConfig) -> ScenarioReport:
    """Run every repetition of a scenario and aggregate the metrics.

    Deterministic in (config, config.seed).  Module errors propagate with
    the repetition index attached.  The across-repetition standard
    deviation is sanity-checked against the mean: a ratio above
    ``variance_warn_ratio`` warns, above ``variance_fail_ratio`` raises
    :class:`ScenarioVarianceError`.
    """
    graph = build_scenario_graph(config)
    model = scenario_model(config)
    rows = []
    for rep in range(config.repetitions):
        try:
            weights, init = _draw_reference(config, graph, rep)
            reference = _reference_observations(config, graph, model, weights,
                                                init, rep)
            del weights  # reference weights never reach the solver
            task = build_task(config, graph, reference)
            solution = solve(task, derive(config.seed, _SOLVE, rep))
        except Exception as exc:
            raise type(exc)(f"repetition {rep}: {exc}") from exc
        rows.append(RepetitionResult(
            repetition=rep,
            final_error=solution.final_error,
            iterations=solution.trace.total_iterations,
            evaluations=solution.trace.total_evaluations,
            wall_ms=solution.trace.wall_time_ms,
            per_timestep=tuple(float(x) for x in solution.per_timestep),
            sample_times=reference.sample_times,
        ))
    errors = np.array([r.final_error for r in rows])
    mean = float(errors.mean())
    std = float(errors.std(ddof=1)) if len(errors) > 1 else 0.0
    if mean > 0.0 and len(errors) > 1:
        ratio = std / mean
        if ratio > config.variance_fail_ratio:
            raise ScenarioVarianceError(
                f"scenario {config.scenario_id}: std/mean {ratio:.2f} exceeds "
                f"{config.variance_fail_ratio}")
        if ratio > config.variance_warn_ratio:
            warnings.warn(
                f"scenario {config.scenario_id}: std/mean {ratio:.2f} above "
                f"{config.variance_warn_ratio}", RuntimeWarning, stacklevel=2)
    return ScenarioReport(
        scenario_id=config.scenario_id,
        rows=tuple(rows),
        mean_error=mean,
        std_error=std,
        mean_iterations=float(np.mean([r.iterations for r in rows])),
        mean_evaluations=float(np.mean([r.evaluations for r in rows])),
        mean_wall_ms=float(np.mean([r.wall_ms for r in rows])),
    )


def report_avg_infection(config: ScenarioConfig) -> float:
    """Mean node infection value at the last observation, averaged over
    the scenario's repetitions.  Forward simulation only; uses the same
    per-repetition reference draws as :func:`run_scenario`."""
    graph = build_scenario_graph(config)
    model = scenario_model(config)
    values = []
    for rep in range(config.repetitions):
        weights, init = _draw_reference(config, graph, rep)
        reference = _reference_observations(config, graph, model, weights,
                                            init, rep)
        values.append(float(reference.values[-1].mean()))
    return float(np.mean(values))


# ---------------------------------------------------------------------------
# flat key-value config files

_STR_FIELDS = {"scenario_id", "graph_kind", "family", "schedule", "kind",
               "graph_path"}
_FLOAT_FIELDS = {"init_fraction", "weight_upper", "seed_prob_low",
                 "seed_prob_high", "graph_forward", "graph_backward",
                 "variance_warn_ratio", "variance_fail_ratio"}
_OPT_INT_FIELDS = {"tau_i", "observation_time", "graph_levels", "graph_rows",
                   "graph_cols", "graph_nodes", "graph_seed"}


def parse_scenario_text(text: str) -> ScenarioConfig:
    known = {f.name for f in fields(ScenarioConfig)}
    kwargs = {}
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        parts = line.split(None, 1)
        if len(parts) != 2:
            raise ScenarioError(f"line {lineno}: expected 'key value'")
        key, value = parts[0], parts[1].strip()
        if key not in known:
            raise ScenarioError(f"line {lineno}: unknown key {key!r}")
        if key in _STR_FIELDS:
            kwargs[key] = value
        elif key in _FLOAT_FIELDS:
            kwargs[key] = float(value)
        elif key in _OPT_INT_FIELDS:
            kwargs[key] = None if value.lower() in ("none", "inf") else int(value)
        else:
            kwargs[key] = int(value)
    missing = [k for k in ("scenario_id", "graph_kind", "family", "horizon",
                           "init_fraction", "weight_upper") if k not in kwargs]
    if missing:
        raise ScenarioError(f"missing required keys: {', '.join(missing)}")
    try:
        return ScenarioConfig(**kwargs)
    except (TypeError, ValueError) as exc:
        raise ScenarioError(str(exc)) from None


def read_scenario_file(path) -> ScenarioConfig:
    with open(path, "r", encoding="utf-8") as f:
        return parse_scenario_text(f.read())


def write_scenario_file(config: ScenarioConfig, path) -> None:
    with open(path, "w", encoding="utf-8", newline="\n") as f:
        for fld in fields(ScenarioConfig):
            value = getattr(config, fld.name)
            if value is None:
                if fld.name == "tau_i":
                    f.write("tau_i inf\n")
                continue
            f.write(f"{fld.name} {value}\n")


# ---------------------------------------------------------------------------
# CSV report serialization

def write_report_csv(report: ScenarioReport, path, include_timing: bool = False) -> None:
    """Per-repetition rows plus one aggregate (mean) row.

    ``wall_ms`` is left empty unless ``include_timing`` is set, keeping
    output files byte-identical across reruns and thread counts.
    """
    with open(path, "w", encoding="utf-8", newline="\n") as f:
        f.write("scenario_id,repetition,final_error,iterations,evaluations,wall_ms\n")
        for r in report.rows:
            stamp = f"{r.wall_ms:.3f}" if include_timing else ""
            f.write(f"{report.scenario_id},{r.repetition},{r.final_error:.17g},"
                    f"{r.iterations},{r.evaluations},{stamp}\n")
        stamp = f"{report.mean_wall_ms:.3f}" if include_timing else ""
        f.write(f"{report.scenario_id},mean,{report.mean_error:.17g},"
                f"{report.mean_iterations:.17g},{report.mean_evaluations:.17g},"
                f"{stamp}\n")


def write_timestep_csv(report: ScenarioReport, path) -> None:
    """Long-format per-time errors: one row per (repetition, sample time)."""
    with open(path, "w", encoding="utf-8", newline="\n") as f:
        f.write("scenario_id,repetition,sample_time,rmse\n")
        for r in report.rows:
            for t, err in zip(r.sample_times, r.per_timestep):
                f.write(f"{report.scenario_id},{r.repetition},{t},{err:.17g}\n")
