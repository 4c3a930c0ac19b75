import numpy as np
import pytest

from spreadfit.graphs import build_graph, gen_forest_fire
from spreadfit.infection import (
    NEVER,
    DimensionMismatchError,
    InstanceTooLargeError,
    ModelSpec,
    ObservationSet,
    estimate_probabilities,
    exact_probabilities,
    extract_binary_observations,
    isclose_bound,
    read_observations,
    simulate_once,
    write_observations,
)
from taskgen import random_small_task


# --- model spec -------------------------------------------------------------

def test_model_spec_families():
    assert ModelSpec.ic(5).tau_i == 1
    assert ModelSpec.si(5).tau_i is None
    assert ModelSpec.sir(3, 5).tau_e == 0
    assert ModelSpec.seir(2, 3, 5).tau_e == 2
    with pytest.raises(ValueError):
        ModelSpec("IC", 1, 1, 5)
    with pytest.raises(ValueError):
        ModelSpec("SI", 0, 4, 5)
    with pytest.raises(ValueError):
        ModelSpec("SIR", 0, None, 5)
    with pytest.raises(ValueError):
        ModelSpec("SEIR", 1, None, 5)
    with pytest.raises(ValueError):
        ModelSpec("IC", 0, 1, 0)


# --- simulate_once ----------------------------------------------------------

def test_certain_transmission_chain():
    g = build_graph(3, [(0, 1), (1, 2)], directed=True)
    traj = simulate_once(g, [1.0, 1.0], ModelSpec.ic(5), [1.0, 0.0, 0.0], rng_seed=1)
    assert traj.infection_times.tolist() == [0, 1, 2]


def test_zero_weights_only_seeds():
    g = gen_forest_fire(40, seed=2)
    init = np.zeros(40)
    init[[3, 7]] = 1.0
    traj = simulate_once(g, np.zeros(g.edge_count), ModelSpec.sir(2, 10), init, 5)
    times = traj.infection_times
    assert times[3] == 0 and times[7] == 0
    assert np.all(times[[v for v in range(40) if v not in (3, 7)]] == NEVER)


def test_si_certain_weights_infect_everything():
    g = gen_forest_fire(60, seed=4)
    init = np.zeros(60)
    init[0] = 1.0
    traj = simulate_once(g, np.ones(g.edge_count), ModelSpec.si(60), init, 0)
    assert np.all(traj.infection_times >= 0)


def test_dimension_mismatch():
    g = build_graph(3, [(0, 1)], directed=True)
    with pytest.raises(DimensionMismatchError):
        simulate_once(g, [0.5, 0.5], ModelSpec.ic(3), [1, 0, 0], 0)
    with pytest.raises(DimensionMismatchError):
        simulate_once(g, [0.5], ModelSpec.ic(3), [1, 0], 0)


def test_state_at_phases():
    g = build_graph(2, [(0, 1)], directed=True)
    model = ModelSpec.seir(2, 3, 10)
    traj = simulate_once(g, [1.0], model, [1.0, 0.0], 0)
    # the seed is latent during [0,2) and first attacks at iteration 2,
    # so node 1 is infected at t=3, latent [3,5), infectious [5,8)
    assert traj.infection_times.tolist() == [0, 3]
    assert traj.state_at(0).tolist() == ["E", "S"]
    assert traj.state_at(2).tolist() == ["I", "S"]
    assert traj.state_at(3).tolist() == ["I", "E"]
    assert traj.state_at(5).tolist() == ["R", "I"]
    assert traj.state_at(8).tolist() == ["R", "R"]


# --- exact oracle on hand-computed cases ------------------------------------

def test_exact_single_edge():
    # p_child = p_parent * w
    g = build_graph(2, [(0, 1)], directed=True)
    obs = exact_probabilities(g, [0.5], ModelSpec.ic(2), [1.0, 0.0], [0, 1])
    assert obs.values[0].tolist() == [1.0, 0.0]
    assert obs.values[1].tolist() == [1.0, 0.5]


def test_exact_two_parents():
    # p = 1 - (1 - p_A w_A)(1 - p_C w_C) = 1 - 0.7 * 0.6 = 0.58
    g = build_graph(3, [(0, 2), (1, 2)], directed=True)
    obs = exact_probabilities(g, [0.3, 0.4], ModelSpec.ic(2),
                              [1.0, 1.0, 0.0], [0, 1])
    assert obs.values[1][2] == pytest.approx(0.58, abs=1e-12)


def test_exact_sir_two_attempts():
    # two independent attempts at w=0.5: 1 - 0.5^2 = 0.75
    g = build_graph(2, [(0, 1)], directed=True)
    obs = exact_probabilities(g, [0.5], ModelSpec.sir(2, 3), [1.0, 0.0], [0, 1, 2])
    assert obs.values[1][1] == pytest.approx(0.5, abs=1e-12)
    assert obs.values[2][1] == pytest.approx(0.75, abs=1e-12)


def test_exact_deterministic_weights_binary_output():
    g = build_graph(4, [(0, 1), (1, 2), (0, 3)], directed=True)
    obs = exact_probabilities(g, [1.0, 0.0, 1.0], ModelSpec.ic(4),
                              [1.0, 0.0, 0.0, 0.0], [0, 4])
    assert set(np.unique(obs.values)) <= {0.0, 1.0}
    assert obs.values[1].tolist() == [1.0, 1.0, 0.0, 1.0]


def test_exact_zero_seeds():
    g = build_graph(3, [(0, 1), (1, 2)], directed=True)
    obs = exact_probabilities(g, [0.7, 0.7], ModelSpec.ic(3),
                              [0.0, 0.0, 0.0], [0, 3])
    assert np.all(obs.values == 0.0)


def test_exact_guard():
    g = gen_forest_fire(40, seed=1)
    with pytest.raises(InstanceTooLargeError):
        exact_probabilities(g, np.full(g.edge_count, 0.5), ModelSpec.sir(3, 8),
                            np.full(40, 0.5), [0, 8])


# --- Monte Carlo estimator vs oracle ----------------------------------------

def test_estimate_matches_hand_values():
    g = build_graph(3, [(0, 2), (1, 2)], directed=True)
    obs = estimate_probabilities(g, [0.3, 0.4], ModelSpec.ic(2),
                                 [1.0, 1.0, 0.0], [0, 1],
                                 num_runs=100_000, rng_seed=7)
    assert obs.values[1][2] == pytest.approx(0.58, abs=isclose_bound(0.58, 100_000))


def test_estimate_vs_exact_randomized():
    # small-scale version of the acceptance criterion; full scale runs there
    num_runs = 20_000
    for seed, family in [(i, f) for i in range(3)
                         for f in ("IC", "SI", "SIR", "SEIR")]:
        graph, weights, init, model, times = random_small_task(seed, family)
        exact = exact_probabilities(graph, weights, model, init, times)
        est = estimate_probabilities(graph, weights, model, init, times,
                                     num_runs=num_runs, rng_seed=seed + 1000)
        bound = 4.0 * np.sqrt(exact.values * (1 - exact.values) / num_runs)
        assert np.all(np.abs(est.values - exact.values) <= bound + 1e-12), \
            (family, seed)


def test_estimate_is_aggregate_of_single_runs():
    g = build_graph(4, [(0, 1), (1, 2), (0, 3), (3, 2)], directed=True)
    w = [0.6, 0.5, 0.3, 0.9]
    model = ModelSpec.sir(2, 6)
    init = [0.8, 0.0, 0.0, 0.4]
    times = (0, 3, 6)
    runs = 500
    obs = estimate_probabilities(g, w, model, init, times, num_runs=runs, rng_seed=11)
    counts = np.zeros((len(times), 4))
    for r in range(runs):
        traj = simulate_once(g, w, model, init, rng_seed=11, run_index=r)
        for ti, t in enumerate(times):
            counts[ti] += (traj.infection_times >= 0) & (traj.infection_times <= t)
    assert np.array_equal(obs.values, counts / runs)


def test_estimate_deterministic_across_threads():
    import numba

    g = gen_forest_fire(50, seed=8)
    w = np.random.default_rng(0).uniform(0, 0.6, g.edge_count)
    init = np.zeros(50)
    init[:5] = 0.7
    args = (g, w, ModelSpec.sir(2, 12), init, (0, 6, 12))
    numba.set_num_threads(1)
    a = estimate_probabilities(*args, num_runs=3000, rng_seed=5)
    numba.set_num_threads(2)
    b = estimate_probabilities(*args, num_runs=3000, rng_seed=5)
    assert np.array_equal(a.values, b.values)
    c = estimate_probabilities(*args, num_runs=3000, rng_seed=5)
    assert np.array_equal(a.values, c.values)


def test_family_equivalences_small():
    g = gen_forest_fire(50, seed=13)
    w = np.random.default_rng(1).uniform(0, 0.8, g.edge_count)
    init = np.zeros(50)
    init[[0, 9]] = 1.0
    for seed in range(30):
        ic = simulate_once(g, w, ModelSpec.ic(12), init, seed)
        sir1 = simulate_once(g, w, ModelSpec.sir(1, 12), init, seed)
        assert np.array_equal(ic.infection_times, sir1.infection_times)
        sir3 = simulate_once(g, w, ModelSpec.sir(3, 12), init, seed)
        seir03 = simulate_once(g, w, ModelSpec.seir(0, 3, 12), init, seed)
        assert np.array_equal(sir3.infection_times, seir03.infection_times)


def test_monotone_coupling_single_weight_increase():
    rng = np.random.default_rng(21)
    for case in range(25):
        graph, weights, init, model, _ = random_small_task(case + 500, "SIR")
        edge = int(rng.integers(0, graph.edge_count))
        raised = weights.copy()
        raised[edge] = min(1.0, raised[edge] + rng.uniform(0.1, 0.5))
        for run in range(40):
            lo = simulate_once(graph, weights, model, init, 77, run_index=run)
            hi = simulate_once(graph, raised, model, init, 77, run_index=run)
            t_lo = np.where(lo.infection_times == NEVER, 10**9, lo.infection_times)
            t_hi = np.where(hi.infection_times == NEVER, 10**9, hi.infection_times)
            assert np.all(t_hi <= t_lo)


def test_estimate_output_invariants():
    for seed in range(6):
        graph, weights, init, model, times = random_small_task(seed + 90, "SEIR")
        obs = estimate_probabilities(graph, weights, model, init, times,
                                     num_runs=2000, rng_seed=seed)
        assert obs.kind == "real"
        assert np.all(obs.values >= 0.0) and np.all(obs.values <= 1.0)
        assert np.all(np.diff(obs.values, axis=0) >= 0.0)


def test_estimate_validates_sample_times():
    g = build_graph(2, [(0, 1)], directed=True)
    with pytest.raises(ValueError):
        estimate_probabilities(g, [0.5], ModelSpec.ic(3), [1, 0], [0, 5])
    with pytest.raises(ValueError):
        estimate_probabilities(g, [0.5], ModelSpec.ic(3), [1, 0], [2, 1])
    with pytest.raises(ValueError):
        estimate_probabilities(g, [0.5], ModelSpec.ic(3), [1, 0], [2])


# --- binary extraction -------------------------------------------------------

def test_extract_binary():
    g = build_graph(3, [(0, 1), (1, 2)], directed=True)
    traj = simulate_once(g, [1.0, 0.0], ModelSpec.ic(4), [1.0, 0.0, 0.0], 3)
    assert traj.infection_times.tolist() == [0, 1, NEVER]
    obs = extract_binary_observations(traj, [0, 2])
    assert obs.kind == "binary"
    assert obs.values[0].tolist() == [1.0, 0.0, 0.0]
    assert obs.values[1].tolist() == [1.0, 1.0, 0.0]


def test_extract_binary_all_never():
    g = build_graph(3, [(0, 1), (1, 2)], directed=True)
    traj = simulate_once(g, [0.5, 0.5], ModelSpec.ic(4), [0.0, 0.0, 0.0], 3)
    obs = extract_binary_observations(traj, [0, 1, 4])
    assert np.all(obs.values == 0.0)


# --- observation sets and file round trips -----------------------------------

def test_observation_set_validation():
    with pytest.raises(ValueError):
        ObservationSet((0,), np.zeros((1, 3)), "real")
    with pytest.raises(ValueError):
        ObservationSet((0, 0), np.zeros((2, 3)), "real")
    with pytest.raises(ValueError):
        ObservationSet((0, 1), np.array([[0.5, 0.2], [0.4, 0.3]]), "real")
    with pytest.raises(ValueError):
        ObservationSet((0, 1), np.array([[0.5, 0.0], [0.6, 1.0]]), "binary")
    with pytest.raises(ValueError):
        ObservationSet((0, 1), np.array([[0.0, 1.2], [0.0, 1.3]]), "real")


def test_observation_roundtrip_real(tmp_path):
    g = gen_forest_fire(20, seed=5)
    w = np.random.default_rng(3).uniform(0, 1, g.edge_count)
    init = np.zeros(20)
    init[0] = 1 / 3
    obs = estimate_probabilities(g, w, ModelSpec.ic(6), init, (0, 3, 6),
                                 num_runs=999, rng_seed=2)
    path = tmp_path / "obs.txt"
    write_observations(obs, path)
    back = read_observations(path)
    assert back.kind == "real"
    assert back.sample_times == obs.sample_times
    assert np.array_equal(back.values, obs.values)  # 17 digits round-trip exactly


def test_observation_roundtrip_binary(tmp_path):
    obs = ObservationSet((0, 4), np.array([[0.0, 1.0, 0.0], [1.0, 1.0, 0.0]]),
                         "binary")
    path = tmp_path / "obs.txt"
    write_observations(obs, path)
    back = read_observations(path)
    assert back.kind == "binary"
    assert np.array_equal(back.values, obs.values)


def test_observation_read_errors(tmp_path):
    path = tmp_path / "bad.txt"
    path.write_text("obs real 2 2\n0 0.1 0.2\n")
    with pytest.raises(ValueError, match="expected 2"):
        read_observations(path)
    path.write_text("something else\n")
    with pytest.raises(ValueError, match="line 1"):
        read_observations(path)
