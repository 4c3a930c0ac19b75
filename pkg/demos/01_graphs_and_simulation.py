#!/usr/bin/env python3
"""Graph generators and forward simulation.

Builds the three graph classes, runs single realizations of each
transmission family, and shows how Monte Carlo averaging turns
realizations into per-node infection probabilities.
"""

import numpy as np

from spreadfit import (
    ModelSpec,
    estimate_probabilities,
    exact_probabilities,
    gen_binary_arborescence,
    gen_directed_lattice,
    gen_forest_fire,
    simulate_once,
)

# --- the graph classes -------------------------------------------------------

tree = gen_binary_arborescence(4)
lattice = gen_directed_lattice(5, 8)
forest = gen_forest_fire(250, seed=7)
print(f"binary tree:     {tree.node_count} nodes, {tree.edge_count} edges")
print(f"directed lattice: {lattice.node_count} nodes, {lattice.edge_count} edges")
print(f"forest fire:     {forest.node_count} nodes, {forest.edge_count} edges")

# --- one realization per family ----------------------------------------------

rng = np.random.default_rng(0)
weights = rng.uniform(0.0, 0.6, forest.edge_count)
init = np.zeros(forest.node_count)
init[rng.choice(forest.node_count, 20, replace=False)] = 1.0

print("\nfinal infected counts, one realization each:")
for model in (ModelSpec.ic(30), ModelSpec.sir(2, 30),
              ModelSpec.seir(2, 3, 30), ModelSpec.si(30)):
    traj = simulate_once(forest, weights, model, init, rng_seed=1)
    infected = int((traj.infection_times >= 0).sum())
    print(f"  {model.family:<5} {infected:>4} / {forest.node_count}")

# --- Monte Carlo estimates converge to the exact distribution ------------------

# a two-parent junction: p = 1 - (1 - 0.3)(1 - 0.4) = 0.58
from spreadfit import build_graph

junction = build_graph(3, [(0, 2), (1, 2)], directed=True)
w = [0.3, 0.4]
seeds = [1.0, 1.0, 0.0]
exact = exact_probabilities(junction, w, ModelSpec.ic(2), seeds, [0, 1])
print(f"\njunction node, exact probability:     {exact.values[1][2]:.4f}")
for runs in (100, 10_000, 1_000_000):
    est = estimate_probabilities(junction, w, ModelSpec.ic(2), seeds, [0, 1],
                                 num_runs=runs, rng_seed=5)
    print(f"junction node, {runs:>9,} run estimate: {est.values[1][2]:.4f}")
