"""spreadfit: estimate per-edge transmission probabilities of network
epidemic processes from observations of the process.

The toolkit simulates discrete-time IC/SI/SIR/SEIR cascades, compares
simulated observations against reference observations (RMSE for
real-valued, ROC AUC for binary), and searches the per-edge probability
space with a fully informed particle swarm.
"""

from .engine import EvaluationReport, InverseTask, Solution, evaluate_weights, solve
from .errors import (DegenerateLabelsError, ErrorSpec, ShapeMismatchError,
                     error_binary_last, error_binary_mean, per_timestep_errors,
                     rmse_mean, roc_auc)
from .graphs import (Graph, GraphError, build_graph, gen_binary_arborescence,
                     gen_directed_lattice, gen_forest_fire, read_graph,
                     write_graph)
from .harness import (RepetitionResult, ScenarioConfig, ScenarioError,
                      ScenarioReport, ScenarioVarianceError,
                      read_scenario_file, report_avg_infection, run_scenario,
                      write_report_csv, write_scenario_file,
                      write_timestep_csv)
from .infection import (NEVER, DimensionMismatchError, InstanceTooLargeError,
                        ModelSpec, ObservationSet, Trajectory,
                        estimate_probabilities, exact_probabilities,
                        extract_binary_observations, read_observations,
                        simulate_once, write_observations)
from .pso import (OptimizationTrace, SwarmConfig, SwarmState, fpso_step,
                  init_swarm, optimize, von_neumann_topology)

__version__ = "0.1.0"

__all__ = [
    "EvaluationReport", "InverseTask", "Solution", "evaluate_weights", "solve",
    "DegenerateLabelsError", "ErrorSpec", "ShapeMismatchError",
    "error_binary_last", "error_binary_mean", "per_timestep_errors",
    "rmse_mean", "roc_auc",
    "Graph", "GraphError", "build_graph", "gen_binary_arborescence",
    "gen_directed_lattice", "gen_forest_fire", "read_graph", "write_graph",
    "RepetitionResult", "ScenarioConfig", "ScenarioError", "ScenarioReport",
    "ScenarioVarianceError", "read_scenario_file", "report_avg_infection",
    "run_scenario", "write_report_csv", "write_scenario_file",
    "write_timestep_csv",
    "NEVER", "DimensionMismatchError", "InstanceTooLargeError", "ModelSpec",
    "ObservationSet", "Trajectory", "estimate_probabilities",
    "exact_probabilities", "extract_binary_observations", "read_observations",
    "simulate_once", "write_observations",
    "OptimizationTrace", "SwarmConfig", "SwarmState", "fpso_step",
    "init_swarm", "optimize", "von_neumann_topology",
]
