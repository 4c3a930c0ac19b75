"""Fully informed particle swarm over the unit box.

Each particle's velocity update aggregates the personal bests of all its
grid neighbours (von Neumann topology on a torus), scaled by independent
U(0, phi) draws and the constriction coefficient chi:

    v <- chi * (v + sum_n U(0, phi) * (b_nbr(n) - x) / N_i)
    x <- x + v, clamped to [0, 1]^D

Updates are synchronous: within an iteration every particle sees the
previous iteration's bests, positions move, all objectives are
evaluated, and only then are bests replaced.  Per-particle randomness is
keyed by (seed, particle, iteration), so results do not depend on
processing order or thread count.
"""

from __future__ import annotations

import time
from dataclasses import dataclass, field

import numpy as np


@dataclass(frozen=True)
class SwarmConfig:
    dimension: int
    num_agents: int = 150
    chi: float = 0.7298
    phi: float = 4.1
    stall_limit: int = 50
    max_iterations: int = 1000
    rng_seed: int = 0
    scalar_phi_draws: bool = False  # one U(0, phi) per neighbour instead of per coordinate

    def __post_init__(self):
        if self.dimension < 1:
            raise ValueError("dimension must be >= 1")
        if self.num_agents < 4:
            raise ValueError("num_agents must be >= 4")
        if not (0.0 < self.chi < 1.0):
            raise ValueError("chi must be in (0, 1)")
        if self.phi <= 0.0:
            raise ValueError("phi must be > 0")
        if self.stall_limit < 1 or self.max_iterations < 1:
            raise ValueError("stall_limit and max_iterations must be >= 1")


@dataclass
class OptimizationTrace:
    """Global best error after the initial evaluation and each iteration."""

    best_errors: list[float] = field(default_factory=list)
    evaluations: list[int] = field(default_factory=list)
    elapsed_ms: list[float] = field(default_factory=list)

    @property
    def total_iterations(self) -> int:
        return len(self.best_errors) - 1

    @property
    def total_evaluations(self) -> int:
        return self.evaluations[-1] if self.evaluations else 0

    @property
    def wall_time_ms(self) -> float:
        return self.elapsed_ms[-1] if self.elapsed_ms else 0.0

    def to_csv(self, path, include_timing: bool = True) -> None:
        with open(path, "w", encoding="utf-8", newline="\n") as f:
            f.write("iteration,best_error,evaluations,elapsed_ms\n")
            for i, (err, ev, ms) in enumerate(
                    zip(self.best_errors, self.evaluations, self.elapsed_ms)):
                stamp = f"{ms:.3f}" if include_timing else ""
                f.write(f"{i},{err:.17g},{ev},{stamp}\n")


@dataclass
class SwarmState:
    positions: np.ndarray
    velocities: np.ndarray
    best_positions: np.ndarray
    best_errors: np.ndarray
    neighbors: tuple[np.ndarray, ...]
    iteration: int
    config: SwarmConfig


def von_neumann_topology(num_agents: int) -> tuple[np.ndarray, ...]:
    """Neighbour lists for agents on an r x c torus with r*c = num_agents.

    The factorization minimizes |r - c|; each agent's neighbours are the
    up/down/left/right grid cells with duplicates and self removed.  For
    a prime agent count the grid degenerates to 1 x n, i.e. a ring with
    two neighbours per agent.
    """
    if num_agents < 4:
        raise ValueError("num_agents must be >= 4")
    rows = 1
    for r in range(1, int(num_agents ** 0.5) + 1):
        if num_agents % r == 0:
            rows = r
    cols = num_agents // rows
    out = []
    for i in range(rows):
        for j in range(cols):
            cells = {
                ((i - 1) % rows) * cols + j,
                ((i + 1) % rows) * cols + j,
                i * cols + (j - 1) % cols,
                i * cols + (j + 1) % cols,
            }
            cells.discard(i * cols + j)
            out.append(np.array(sorted(cells), dtype=np.int64))
    return tuple(out)


def _stream(seed: int, particle: int, iteration: int) -> np.random.Generator:
    return np.random.default_rng((seed & (2**64 - 1), particle, iteration))


def init_swarm(config: SwarmConfig) -> SwarmState:
    """Uniform random positions in [0, 1]^D, zero velocities, bests unset."""
    a, d = config.num_agents, config.dimension
    positions = np.empty((a, d))
    for p in range(a):
        positions[p] = _stream(config.rng_seed, p, 0).uniform(0.0, 1.0, d)
    return SwarmState(
        positions=positions,
        velocities=np.zeros((a, d)),
        best_positions=positions.copy(),
        best_errors=np.full(a, np.inf),
        neighbors=von_neumann_topology(a),
        iteration=0,
        config=config,
    )


def _evaluate(objective, positions, order=None) -> np.ndarray:
    errors = np.empty(len(positions))
    for p in (order if order is not None else range(len(positions))):
        e = float(objective(positions[p]))
        if not np.isfinite(e):
            raise RuntimeError(
                f"objective returned non-finite value {e!r} for particle {p}")
        errors[p] = e
    return errors


def fpso_step(state: SwarmState, objective, particle_order=None) -> SwarmState:
    """One synchronous iteration; returns the updated swarm.

    ``particle_order`` only permutes the processing sequence; because the
    update reads the previous state exclusively, the result is identical
    for any order (exercised by the tests).
    """
    cfg = state.config
    a, d = cfg.num_agents, cfg.dimension
    if np.any(~np.isfinite(state.best_errors)):
        raise RuntimeError("swarm bests not initialized; evaluate the swarm first")
    it = state.iteration + 1
    new_pos = np.empty((a, d))
    new_vel = np.empty((a, d))
    order = list(particle_order) if particle_order is not None else list(range(a))
    for p in order:
        nbr = state.neighbors[p]
        g = _stream(cfg.rng_seed, p, it)
        shape = (len(nbr), 1) if cfg.scalar_phi_draws else (len(nbr), d)
        u = g.uniform(0.0, cfg.phi, shape)
        pull = (u * (state.best_positions[nbr] - state.positions[p])).sum(axis=0)
        v = cfg.chi * (state.velocities[p] + pull / len(nbr))
        x = state.positions[p] + v
        clamped = (x < 0.0) | (x > 1.0)
        x = np.clip(x, 0.0, 1.0)
        v = np.where(clamped, 0.0, v)
        new_pos[p] = x
        new_vel[p] = v
    errors = _evaluate(objective, new_pos, order)
    improved = errors < state.best_errors
    best_positions = np.where(improved[:, None], new_pos, state.best_positions)
    best_errors = np.where(improved, errors, state.best_errors)
    return SwarmState(new_pos, new_vel, best_positions, best_errors,
                      state.neighbors, it, cfg)


def optimize(objective, config: SwarmConfig, target_error: float | None = None):
    """Minimize ``objective`` over [0, 1]^D with the configured swarm.

    Stops when the global best has not strictly improved for
    ``stall_limit`` consecutive iterations, when ``max_iterations`` is
    reached, or as soon as it drops to ``target_error`` or below.
    Returns ``(best_position, best_error, trace)``.
    """
    t0 = time.perf_counter()
    state = init_swarm(config)
    state.best_errors = _evaluate(objective, state.positions)
    trace = OptimizationTrace()
    evals = config.num_agents
    best = float(state.best_errors.min())
    trace.best_errors.append(best)
    trace.evaluations.append(evals)
    trace.elapsed_ms.append((time.perf_counter() - t0) * 1e3)
    stall = 0
    while (state.iteration < config.max_iterations and stall < config.stall_limit
           and not (target_error is not None and best <= target_error)):
        state = fpso_step(state, objective)
        evals += config.num_agents
        new_best = float(state.best_errors.min())
        if new_best < best:
            best = new_best
            stall = 0
        else:
            stall += 1
        trace.best_errors.append(best)
        trace.evaluations.append(evals)
        trace.elapsed_ms.append((time.perf_counter() - t0) * 1e3)
    winner = int(np.argmin(state.best_errors))
    return state.best_positions[winner].copy(), float(state.best_errors[winner]), trace
