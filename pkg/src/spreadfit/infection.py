"""Discrete-time stochastic transmission models on graphs.

Families: IC (independent cascade), SI, SIR, SEIR.  A node successfully
attacked at iteration ``i`` gets infection time ``i + 1`` (seeds have
time 0), is latent for ``tau_e`` iterations, then attacks each
susceptible out-neighbour once per iteration for ``tau_i`` iterations
with the edge's transmission probability, then is removed.  SI nodes are
never removed; the process is truncated at the model horizon.

Within an iteration attempts are ordered by (attacker id, edge index),
but each coin is keyed by (run, arc, attempt) so outcomes do not depend
on the order; newly infected nodes neither attack nor are attacked in
the iteration that infects them.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache

import numpy as np

from . import _kernel
from .graphs import Graph

NEVER = -1  # public "never infected" marker in trajectories

_FAMILIES = ("IC", "SI", "SIR", "SEIR")


class DimensionMismatchError(ValueError):
    """Vector length does not match the graph or observation shape."""


class InstanceTooLargeError(ValueError):
    """Exhaustive enumeration would exceed the configured outcome budget."""


@dataclass(frozen=True)
class ModelSpec:
    """Transmission model family plus timing parameters.

    ``tau_i=None`` means an unbounded infectious period (SI only); the
    simulation is still truncated at ``horizon`` iterations.
    """

    family: str
    tau_e: int
    tau_i: int | None
    horizon: int

    def __post_init__(self):
        if self.family not in _FAMILIES:
            raise ValueError(f"unknown family {self.family!r}")
        if self.horizon < 1:
            raise ValueError("horizon must be >= 1")
        if self.tau_e < 0:
            raise ValueError("tau_e must be >= 0")
        if self.family == "IC" and (self.tau_e != 0 or self.tau_i != 1):
            raise ValueError("IC requires tau_e=0, tau_i=1")
        if self.family == "SIR" and (self.tau_e != 0 or self.tau_i is None or self.tau_i < 1):
            raise ValueError("SIR requires tau_e=0 and finite tau_i >= 1")
        if self.family == "SI" and (self.tau_e != 0 or self.tau_i is not None):
            raise ValueError("SI requires tau_e=0 and unbounded tau_i (None)")
        if self.family == "SEIR" and (self.tau_i is None or self.tau_i < 1):
            raise ValueError("SEIR requires finite tau_i >= 1")

    @classmethod
    def ic(cls, horizon: int) -> "ModelSpec":
        return cls("IC", 0, 1, horizon)

    @classmethod
    def si(cls, horizon: int) -> "ModelSpec":
        return cls("SI", 0, None, horizon)

    @classmethod
    def sir(cls, tau_i: int, horizon: int) -> "ModelSpec":
        return cls("SIR", 0, tau_i, horizon)

    @classmethod
    def seir(cls, tau_e: int, tau_i: int, horizon: int) -> "ModelSpec":
        return cls("SEIR", tau_e, tau_i, horizon)

    @property
    def effective_tau_i(self) -> int:
        # within a horizon-truncated run, "unbounded" and horizon+1 agree
        return self.horizon + 1 if self.tau_i is None else self.tau_i


@dataclass(frozen=True)
class Trajectory:
    """One realization: per-node infection time (NEVER if uninfected)."""

    infection_times: np.ndarray
    model: ModelSpec

    def state_at(self, t: int) -> np.ndarray:
        """Per-node compartment at time ``t`` as 'S', 'E', 'I', or 'R'."""
        times = self.infection_times
        out = np.full(len(times), "S", dtype="<U1")
        inf = (times != NEVER) & (times <= t)
        t_active = times + self.model.tau_e
        out[inf & (t < t_active)] = "E"
        if self.model.tau_i is None:
            out[inf & (t >= t_active)] = "I"
        else:
            out[inf & (t >= t_active) & (t < t_active + self.model.tau_i)] = "I"
            out[inf & (t >= t_active + self.model.tau_i)] = "R"
        return out


@dataclass(frozen=True)
class ObservationSet:
    """Per-node observation vectors at strictly increasing sample times.

    kind "real": cumulative infection probabilities in [0, 1],
    non-decreasing in t for every node.  kind "binary": 0/1 ever-infected
    flags, also non-decreasing (infection is absorbing).
    """

    sample_times: tuple[int, ...]
    values: np.ndarray
    kind: str

    def __post_init__(self):
        if self.kind not in ("real", "binary"):
            raise ValueError(f"unknown observation kind {self.kind!r}")
        times = self.sample_times
        if len(times) < 2:
            raise ValueError("at least two sample times are required")
        if any(t < 0 for t in times) or any(b <= a for a, b in zip(times, times[1:])):
            raise ValueError("sample times must be non-negative and strictly increasing")
        vals = self.values
        if vals.ndim != 2 or vals.shape[0] != len(times):
            raise DimensionMismatchError("values must be (num_times, node_count)")
        if np.any(vals < 0.0) or np.any(vals > 1.0):
            raise ValueError("observation values must lie in [0, 1]")
        if self.kind == "binary" and not np.all((vals == 0.0) | (vals == 1.0)):
            raise ValueError("binary observations must be 0 or 1")
        if np.any(np.diff(vals, axis=0) < 0.0):
            raise ValueError("per-node observations must be non-decreasing in t")

    @property
    def node_count(self) -> int:
        return self.values.shape[1]

    def as_real(self) -> "ObservationSet":
        """View binary flags as real-valued observations (for RMSE reports)."""
        if self.kind == "real":
            return self
        return ObservationSet(self.sample_times, self.values.astype(float), "real")


@dataclass(frozen=True)
class _ArcTable:
    """Directed attack arcs in (source, edge index) order, CSR by source."""

    arc_tgt: np.ndarray
    arc_widx: np.ndarray
    node_ptr: np.ndarray
    arc_src: np.ndarray


@lru_cache(maxsize=16)
def _arc_table(graph: Graph) -> _ArcTable:
    arcs = []
    for ei, (u, v) in enumerate(graph.edges):
        arcs.append((u, v, ei))
        if not graph.directed:
            arcs.append((v, u, ei))
    arcs.sort()
    n = graph.node_count
    arc_src = np.array([a[0] for a in arcs], dtype=np.int64).reshape(-1)
    arc_tgt = np.array([a[1] for a in arcs], dtype=np.int64).reshape(-1)
    arc_widx = np.array([a[2] for a in arcs], dtype=np.int64).reshape(-1)
    node_ptr = np.zeros(n + 1, dtype=np.int64)
    for s in arc_src:
        node_ptr[s + 1] += 1
    node_ptr = np.cumsum(node_ptr)
    return _ArcTable(arc_tgt, arc_widx, node_ptr, arc_src)


def _check_weights(graph: Graph, weights) -> np.ndarray:
    w = np.ascontiguousarray(weights, dtype=np.float64)
    if w.shape != (graph.edge_count,):
        raise DimensionMismatchError(
            f"expected {graph.edge_count} edge weights, got shape {w.shape}")
    if w.size and (w.min() < 0.0 or w.max() > 1.0):
        raise ValueError("edge weights must lie in [0, 1]")
    return w


def _check_init(graph: Graph, init) -> np.ndarray:
    p = np.ascontiguousarray(init, dtype=np.float64)
    if p.shape != (graph.node_count,):
        raise DimensionMismatchError(
            f"expected {graph.node_count} initial probabilities, got shape {p.shape}")
    if p.min() < 0.0 or p.max() > 1.0:
        raise ValueError("initial probabilities must lie in [0, 1]")
    return p


def _check_sample_times(sample_times, horizon: int) -> np.ndarray:
    t = np.ascontiguousarray(sample_times, dtype=np.int64)
    if t.ndim != 1 or len(t) < 2:
        raise ValueError("at least two sample times are required")
    if t[0] < 0 or t[-1] > horizon or np.any(np.diff(t) <= 0):
        raise ValueError(
            f"sample times must be strictly increasing within [0, {horizon}]")
    return t


def simulate_once(graph: Graph, weights, model: ModelSpec, init,
                  rng_seed: int, run_index: int = 0) -> Trajectory:
    """One stochastic realization, deterministic in (args, seed, run_index).

    ``run_index`` selects a realization within the seed's schedule;
    :func:`estimate_probabilities` with the same seed aggregates exactly
    the realizations ``run_index = 0 .. num_runs - 1``.
    """
    w = _check_weights(graph, weights)
    p = _check_init(graph, init)
    tab = _arc_table(graph)
    t_inf = _kernel.single_trajectory(
        graph.node_count, tab.arc_tgt, tab.arc_widx, tab.node_ptr, w, p,
        model.tau_e, model.effective_tau_i, model.horizon,
        np.uint64(rng_seed & (2**64 - 1)), run_index)
    t_inf = np.where(t_inf > model.horizon, NEVER, t_inf)
    return Trajectory(t_inf, model)


def estimate_probabilities(graph: Graph, weights, model: ModelSpec, init,
                           sample_times, num_runs: int = 10_000,
                           rng_seed: int = 0) -> ObservationSet:
    """Monte Carlo estimate of cumulative infection probabilities.

    Entry (t, v) is the fraction of ``num_runs`` independent realizations
    in which node v's infection time is <= t.  Deterministic for a fixed
    seed, independent of thread count.
    """
    w = _check_weights(graph, weights)
    p = _check_init(graph, init)
    if num_runs < 1:
        raise ValueError("num_runs must be >= 1")
    times = _check_sample_times(sample_times, model.horizon)
    tab = _arc_table(graph)
    counts = _kernel.mc_counts(
        graph.node_count, tab.arc_tgt, tab.arc_widx, tab.node_ptr, w, p,
        model.tau_e, model.effective_tau_i, model.horizon, times,
        np.uint64(rng_seed & (2**64 - 1)), num_runs)
    return ObservationSet(tuple(int(t) for t in times), counts / num_runs, "real")


def extract_binary_observations(trajectory: Trajectory, sample_times) -> ObservationSet:
    """Ever-infected flags at the sample times: 1 iff infection time <= t."""
    times = _check_sample_times(sample_times, trajectory.model.horizon)
    t_inf = trajectory.infection_times
    flags = np.zeros((len(times), len(t_inf)))
    for i, t in enumerate(times):
        flags[i] = (t_inf != NEVER) & (t_inf <= t)
    return ObservationSet(tuple(int(t) for t in times), flags, "binary")


def exact_probabilities(graph: Graph, weights, model: ModelSpec, init,
                        sample_times, max_outcomes: int = 500_000) -> ObservationSet:
    """Exact cumulative infection probabilities by exhaustive enumeration.

    Enumerates every joint outcome of the stochastic choices (seed coins,
    and per attack arc the attempt index of the first successful coin) and
    weights each by its probability, resolving infection times with a
    shortest-path relaxation.  Only feasible for small instances; raises
    :class:`InstanceTooLargeError` when the outcome count would exceed
    ``max_outcomes``.  Serves as the brute-force cross-check for
    :func:`estimate_probabilities`.
    """
    w = _check_weights(graph, weights)
    p = _check_init(graph, init)
    times = _check_sample_times(sample_times, model.horizon)
    tab = _arc_table(graph)
    n = graph.node_count
    n_arcs = len(tab.arc_tgt)
    tau_e, horizon = model.tau_e, model.horizon
    m_att = min(model.effective_tau_i, horizon)
    INF = np.int64(1 << 30)

    # stochastic dimensions: seed coins with 0 < p < 1, arcs with 0 < w < 1
    seed_dims = [v for v in range(n) if 0.0 < p[v] < 1.0]
    arc_dims = [a for a in range(n_arcs) if 0.0 < w[tab.arc_widx[a]] < 1.0]
    total = 1
    for _ in seed_dims:
        total *= 2
    for _ in arc_dims:
        total *= m_att + 1
    if total > max_outcomes:
        raise InstanceTooLargeError(
            f"{total} outcomes exceed the enumeration budget of {max_outcomes}")

    shape = [2] * len(seed_dims) + [m_att + 1] * len(arc_dims)
    k = total
    idx = np.unravel_index(np.arange(k), shape) if shape else ()
    probs = np.ones(k)

    # initial times from seed outcomes
    base = np.full((k, n), INF, dtype=np.int64)
    base[:, p == 1.0] = 0
    for d, v in enumerate(seed_dims):
        seeded = idx[d] == 1
        base[seeded, v] = 0
        probs *= np.where(seeded, p[v], 1.0 - p[v])

    # per-arc latency-plus-delay lengths; index m_att encodes "never"
    arc_dim_of = {a: d for d, a in enumerate(arc_dims)}
    lengths = np.empty((k, n_arcs), dtype=np.int64)
    for a in range(n_arcs):
        wa = w[tab.arc_widx[a]]
        if wa == 1.0:
            lengths[:, a] = tau_e + 1
        elif wa == 0.0:
            lengths[:, a] = INF
        else:
            d = len(seed_dims) + arc_dim_of[a]
            delay_idx = idx[d]
            lengths[:, a] = np.where(delay_idx == m_att, INF, tau_e + delay_idx + 1)
            probs *= np.where(delay_idx == m_att,
                              (1.0 - wa) ** m_att,
                              wa * (1.0 - wa) ** delay_idx)

    # multi-source shortest paths, relaxed to a fixed point
    t_best = base
    if n_arcs:
        order = np.argsort(tab.arc_tgt, kind="stable")
        tgt_sorted = tab.arc_tgt[order]
        src_sorted = tab.arc_src[order]
        starts = np.flatnonzero(np.r_[True, np.diff(tgt_sorted) > 0])
        tgt_ids = tgt_sorted[starts]
        len_sorted = lengths[:, order]
        for _ in range(n):
            cand = t_best[:, src_sorted] + len_sorted
            best_in = np.minimum.reduceat(cand, starts, axis=1)
            updated = np.minimum(t_best[:, tgt_ids], best_in)
            if np.array_equal(updated, t_best[:, tgt_ids]):
                break
            t_best = t_best.copy()
            t_best[:, tgt_ids] = updated

    values = np.empty((len(times), n))
    for ti, t in enumerate(times):
        reached = (t_best <= min(int(t), horizon)).astype(float)
        values[ti] = probs @ reached
    values = np.clip(values, 0.0, 1.0)
    return ObservationSet(tuple(int(t) for t in times), values, "real")


def write_observations(obs: ObservationSet, path) -> None:
    """Write observations as text; reals keep 17 significant digits so the
    round trip is bit-exact."""
    with open(path, "w", encoding="utf-8", newline="\n") as f:
        f.write(f"obs {obs.kind} {obs.node_count} {len(obs.sample_times)}\n")
        for t, row in zip(obs.sample_times, obs.values):
            if obs.kind == "binary":
                cells = " ".join(str(int(v)) for v in row)
            else:
                cells = " ".join(f"{v:.17g}" for v in row)
            f.write(f"{t} {cells}\n")


def read_observations(path) -> ObservationSet:
    """Read observations written by :func:`write_observations`."""
    with open(path, "r", encoding="utf-8") as f:
        lines = [ln for ln in f.read().splitlines() if ln.strip()]
    if not lines:
        raise ValueError("line 1: empty observation file")
    head = lines[0].split()
    if len(head) != 4 or head[0] != "obs" or head[1] not in ("real", "binary"):
        raise ValueError("line 1: expected 'obs <real|binary> <node_count> <num_times>'")
    kind, n, nt = head[1], int(head[2]), int(head[3])
    if len(lines) - 1 != nt:
        raise ValueError(f"expected {nt} observation rows, found {len(lines) - 1}")
    sample_times = []
    values = np.empty((nt, n))
    for i, line in enumerate(lines[1:]):
        parts = line.split()
        if len(parts) != n + 1:
            raise ValueError(f"line {i + 2}: expected a time and {n} values")
        sample_times.append(int(parts[0]))
        values[i] = [float(x) for x in parts[1:]]
    return ObservationSet(tuple(sample_times), values, kind)


def mean_infection(obs: ObservationSet, t: int | None = None) -> float:
    """Mean per-node observation value at time ``t`` (default: last)."""
    if t is None:
        return float(obs.values[-1].mean())
    return float(obs.values[list(obs.sample_times).index(t)].mean())


def isclose_bound(p: float, num_runs: int, sigmas: float = 4.0) -> float:
    """Monte Carlo deviation bound ``sigmas * sqrt(p(1-p)/num_runs)``."""
    return sigmas * math.sqrt(p * (1.0 - p) / num_runs)
