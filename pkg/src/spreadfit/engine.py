"""Inverse solver: recover edge transmission probabilities from
observations of a spreading process.

The solver wires the pieces together: candidate weight vectors are
simulated forward under the task's model, compared against the reference
observations by the task's error function, and refined with the fully
informed particle swarm.  The first observation is consumed as the
initial condition of the candidate simulations (it is the a-priori node
state), so real-valued tasks are scored on the later sample times only.
"""

from __future__ import annotations

from dataclasses import dataclass, replace

import numpy as np

from . import _kernel
from ._rng import derive
from .errors import (DegenerateLabelsError, ErrorSpec, error_binary_mean,
                     per_timestep_errors, roc_auc)
from .graphs import Graph
from .infection import (ModelSpec, ObservationSet, _arc_table, _check_weights,
                        estimate_probabilities)
from .pso import OptimizationTrace, SwarmConfig, optimize

# seed-derivation tags
_OBJECTIVE, _REPORT, _SWARM = 1, 2, 3


@dataclass(frozen=True)
class InverseTask:
    """Everything the solver needs; never carries reference weights."""

    graph: Graph
    model: ModelSpec
    reference: ObservationSet
    error: ErrorSpec
    swarm: SwarmConfig
    mc_runs: int = 1000
    report_mc_runs: int = 10_000
    accuracy_target: float = 0.0

    def __post_init__(self):
        if self.reference.node_count != self.graph.node_count:
            raise ValueError("reference node count does not match the graph")
        if self.reference.sample_times[-1] > self.model.horizon:
            raise ValueError("last sample time exceeds the model horizon")
        expected = "rmse_mean" if self.reference.kind == "real" else "one_minus_auc_last"
        if self.error.kind != expected:
            raise ValueError(
                f"error kind {self.error.kind!r} incompatible with "
                f"{self.reference.kind!r} reference")
        if self.mc_runs < 1 or self.report_mc_runs < 1:
            raise ValueError("mc_runs and report_mc_runs must be >= 1")


@dataclass(frozen=True)
class Solution:
    """Solver output.

    ``final_error`` is the error at the end of the optimization, i.e. the
    best objective value under the solver's own Monte Carlo schedule
    (``mc_runs`` realizations).  ``computed_observations`` and
    ``per_timestep`` are re-simulated at reporting fidelity
    (``report_mc_runs`` realizations, independent seed).
    """

    weights: np.ndarray
    final_error: float
    trace: OptimizationTrace
    per_timestep: np.ndarray
    computed_observations: ObservationSet


@dataclass(frozen=True)
class EvaluationReport:
    final_error: float
    per_timestep: np.ndarray
    observations: ObservationSet


def _initial_condition(reference: ObservationSet) -> np.ndarray:
    # the t0 observation is the a-priori state; binary flags become
    # probability-1 seeds
    return reference.values[0].astype(float)


def _score(reference: ObservationSet, values: np.ndarray) -> float:
    """Error between the reference and computed values at the same times."""
    if reference.kind == "real":
        diff = reference.values[1:] - values[1:]
        return float(np.sqrt(np.mean(diff * diff, axis=1)).mean())
    if len(reference.sample_times) == 2:
        return 1.0 - roc_auc(values[-1], reference.values[-1])
    computed = ObservationSet(reference.sample_times, values, "real")
    ref = reference
    return error_binary_mean(ref, computed)


def _validate_reference(task: InverseTask):
    if task.reference.kind == "binary":
        flags = task.reference.values[-1]
        if np.all(flags == flags[0]):
            raise DegenerateLabelsError(
                "binary reference is degenerate at the final sample time")


def solve(task: InverseTask, seed: int) -> Solution:
    """Run the inverse optimization; deterministic given (task, seed).

    All randomness (particle initialization, simulation schedules) is
    derived from ``seed``; the swarm config's own rng_seed is overridden.
    Stops early once the error reaches ``task.accuracy_target``.
    """
    _validate_reference(task)
    graph, model = task.graph, task.model
    init = _initial_condition(task.reference)
    times = np.asarray(task.reference.sample_times, dtype=np.int64)
    tab = _arc_table(graph)
    objective_seed = np.uint64(derive(seed, _OBJECTIVE))
    reference = task.reference

    def objective(w):
        counts = _kernel.mc_counts(
            graph.node_count, tab.arc_tgt, tab.arc_widx, tab.node_ptr,
            np.ascontiguousarray(w), init, model.tau_e, model.effective_tau_i,
            model.horizon, times, objective_seed, task.mc_runs)
        return _score(reference, counts / task.mc_runs)

    cfg = replace(task.swarm, dimension=graph.edge_count,
                  rng_seed=derive(seed, _SWARM))
    best_w, best_err, trace = optimize(objective, cfg,
                                       target_error=task.accuracy_target)
    report = evaluate_weights(task, best_w, derive(seed, _REPORT))
    return Solution(weights=best_w, final_error=best_err, trace=trace,
                    per_timestep=report.per_timestep,
                    computed_observations=report.observations)


def evaluate_weights(task: InverseTask, weights, seed: int) -> EvaluationReport:
    """Score one weight vector at reporting fidelity.

    Returns the task error, the RMSE at every sample time (length |T|;
    for real references the mean over the scored times, i.e. all but the
    first, equals ``final_error``), and the computed observations.
    """
    w = _check_weights(task.graph, weights)
    init = _initial_condition(task.reference)
    obs = estimate_probabilities(
        task.graph, w, task.model, init, task.reference.sample_times,
        num_runs=task.report_mc_runs, rng_seed=derive(seed, _REPORT))
    final_error = _score(task.reference, obs.values)
    per_t = per_timestep_errors(task.reference.as_real(), obs)
    return EvaluationReport(final_error=final_error, per_timestep=per_t,
                            observations=obs)
