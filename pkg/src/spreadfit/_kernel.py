"""Compiled core of the discrete-time transmission simulator.

One kernel simulates a single realization; the Monte Carlo entry point
fans independent realizations over a fixed number of chunks (not tied to
the thread count) and accumulates integer counts, so results are
bit-identical for any ``numba.set_num_threads`` setting.

Randomness is counter-based: every coin is a pure function of
``(run key, arc, attempt)`` or ``(run key, node)`` through SplitMix64.
Consequences relied on elsewhere:

- no stream state, so scheduling cannot perturb outcomes;
- coupled comparisons: re-running with one edge weight raised reuses the
  same uniforms per (arc, attempt), which makes infection times pointwise
  monotone in the weights.
"""

import numpy as np
from numba import njit, prange

U64 = np.uint64
_GOLD = U64(0x9E3779B97F4A7C15)

# infection times beyond the horizon mean "never"; chunk count fixed for
# thread-count-independent accumulation
N_CHUNKS = 64


@njit(inline="always", cache=True)
def _mix(z):
    z = (z ^ (z >> U64(30))) * U64(0xBF58476D1CE4E5B9)
    z = (z ^ (z >> U64(27))) * U64(0x94D049BB133111EB)
    return z ^ (z >> U64(31))


@njit(inline="always", cache=True)
def _u01(key, a, b):
    # uniform in [0, 1) keyed by two integers; a = -1 reserved for seed coins
    h = _mix(key + _GOLD * (U64(a) + U64(2)))
    h = _mix(h + _GOLD * (U64(b) + U64(2)))
    return (h >> U64(11)) * (1.0 / 9007199254740992.0)


@njit(inline="always", cache=True)
def _run_key(base_seed, run_index):
    return _mix(U64(base_seed) + _GOLD * (U64(run_index) + U64(1)))


@njit(cache=True)
def _trajectory(n, arc_tgt, arc_widx, node_ptr, weights, init,
                tau_e, tau_i, horizon, run_key, t_inf, infected):
    """One realization; fills t_inf (horizon + 2 == never), returns #infected."""
    never = horizon + 2
    n_inf = 0
    for v in range(n):
        p = init[v]
        if p > 0.0 and (p >= 1.0 or _u01(run_key, -1, v) < p):
            t_inf[v] = 0
            infected[n_inf] = v
            n_inf += 1
        else:
            t_inf[v] = never
    for i in range(horizon):
        if n_inf == n:
            break
        alive = False
        n_start = n_inf
        for k in range(n_start):
            u = infected[k]
            t_active = t_inf[u] + tau_e
            if i >= t_active + tau_i:
                continue  # removed
            alive = True
            if i < t_active:
                continue  # still latent
            attempt = i - t_active + 1
            for a in range(node_ptr[u], node_ptr[u + 1]):
                v = arc_tgt[a]
                if t_inf[v] != never:
                    continue
                if _u01(run_key, a, attempt) < weights[arc_widx[a]]:
                    t_inf[v] = i + 1
                    infected[n_inf] = v
                    n_inf += 1
        if not alive:
            break
    return n_inf


@njit(cache=True)
def single_trajectory(n, arc_tgt, arc_widx, node_ptr, weights, init,
                      tau_e, tau_i, horizon, base_seed, run_index):
    t_inf = np.empty(n, dtype=np.int64)
    infected = np.empty(n, dtype=np.int64)
    _trajectory(n, arc_tgt, arc_widx, node_ptr, weights, init,
                tau_e, tau_i, horizon, _run_key(base_seed, run_index),
                t_inf, infected)
    return t_inf


@njit(cache=True, parallel=True)
def mc_counts(n, arc_tgt, arc_widx, node_ptr, weights, init,
              tau_e, tau_i, horizon, sample_times, base_seed, num_runs):
    """Counts of runs with infection time <= t, shape (len(sample_times), n)."""
    n_chunks = N_CHUNKS if num_runs >= N_CHUNKS else num_runs
    nt = len(sample_times)
    counts = np.zeros((n_chunks, nt, n), dtype=np.int64)
    for c in prange(n_chunks):
        t_inf = np.empty(n, dtype=np.int64)
        infected = np.empty(n, dtype=np.int64)
        lo = c * num_runs // n_chunks
        hi = (c + 1) * num_runs // n_chunks
        for r in range(lo, hi):
            n_inf = _trajectory(n, arc_tgt, arc_widx, node_ptr, weights, init,
                                tau_e, tau_i, horizon, _run_key(base_seed, r),
                                t_inf, infected)
            for ti in range(nt):
                t = sample_times[ti]
                for k in range(n_inf):
                    v = infected[k]
                    if t_inf[v] <= t:
                        counts[c, ti, v] += 1
    out = np.zeros((nt, n), dtype=np.int64)
    for c in range(n_chunks):
        out += counts[c]
    return out
