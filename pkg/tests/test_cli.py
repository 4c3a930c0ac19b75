import filecmp
from pathlib import Path

import pytest

from spreadfit.cli import main
from spreadfit.graphs import read_graph
from spreadfit.infection import read_observations

GOLDEN = Path(__file__).parent / "golden"


def test_gen_tree(tmp_path, capsys):
    out = tmp_path / "tree.txt"
    assert main(["gen", "tree", "--levels", "2", "--out", str(out)]) == 0
    assert out.read_text() == (
        "directed 7\n0 1\n0 2\n1 3\n1 4\n2 5\n2 6\n"
    )
    assert "7 nodes, 6 edges" in capsys.readouterr().out


def test_gen_lattice_and_forest_fire(tmp_path):
    lat = tmp_path / "lat.txt"
    assert main(["gen", "lattice", "--rows", "2", "--cols", "3",
                 "--out", str(lat)]) == 0
    g = read_graph(lat)
    assert g.node_count == 6 and g.edge_count == 7
    ff = tmp_path / "ff.txt"
    assert main(["gen", "forest-fire", "--nodes", "25", "--seed", "4",
                 "--out", str(ff)]) == 0
    assert read_graph(ff).node_count == 25


def test_simulate_solve_roundtrip(tmp_path):
    graph = tmp_path / "g.txt"
    weights = tmp_path / "w.txt"
    obs = tmp_path / "o.txt"
    main(["gen", "tree", "--levels", "2", "--out", str(graph)])
    weights.write_text("".join(f"{x}\n" for x in (0.9, 0.2, 0.7, 0.4, 0.85, 0.1)))
    assert main(["simulate", "--graph", str(graph), "--weights", str(weights),
                 "--family", "IC", "--horizon", "3", "--times", "0,3",
                 "--init", "0:1", "--mc-runs", "500", "--seed", "1",
                 "--out", str(obs)]) == 0
    parsed = read_observations(obs)
    assert parsed.kind == "real"
    out_dir = tmp_path / "sol"
    assert main(["solve", "--graph", str(graph), "--observations", str(obs),
                 "--family", "IC", "--horizon", "3", "--mc-runs", "200",
                 "--report-mc-runs", "500", "--agents", "8", "--stall", "5",
                 "--max-iter", "25", "--seed", "3",
                 "--out-dir", str(out_dir)]) == 0
    for name in ("weights.txt", "trace.csv", "per_timestep.csv",
                 "computed_observations.txt"):
        assert (out_dir / name).exists()
    assert len((out_dir / "weights.txt").read_text().splitlines()) == 6
    read_observations(out_dir / "computed_observations.txt")


def test_solve_reproduces_golden_outputs(tmp_path):
    out_dir = tmp_path / "run"
    assert main(["solve", "--graph", str(GOLDEN / "graph.txt"),
                 "--observations", str(GOLDEN / "observations.txt"),
                 "--family", "IC", "--horizon", "3", "--mc-runs", "400",
                 "--report-mc-runs", "1000", "--agents", "9", "--stall", "10",
                 "--max-iter", "60", "--seed", "77",
                 "--out-dir", str(out_dir)]) == 0
    for name in ("weights.txt", "trace.csv", "per_timestep.csv",
                 "computed_observations.txt"):
        assert filecmp.cmp(out_dir / name, GOLDEN / "expected" / name,
                           shallow=False), name


def test_solve_byte_identical_across_threads(tmp_path):
    dirs = []
    for threads in ("1", "2"):
        out_dir = tmp_path / f"t{threads}"
        assert main(["solve", "--graph", str(GOLDEN / "graph.txt"),
                     "--observations", str(GOLDEN / "observations.txt"),
                     "--family", "IC", "--horizon", "3", "--mc-runs", "300",
                     "--agents", "8", "--stall", "5", "--max-iter", "20",
                     "--seed", "9", "--threads", threads,
                     "--out-dir", str(out_dir)]) == 0
        dirs.append(out_dir)
    for name in ("weights.txt", "trace.csv", "per_timestep.csv",
                 "computed_observations.txt"):
        assert filecmp.cmp(dirs[0] / name, dirs[1] / name, shallow=False), name


def test_scenario_and_report(tmp_path):
    cfg = tmp_path / "scenario.cfg"
    cfg.write_text(
        "scenario_id smoke\n"
        "graph_kind tree\n"
        "graph_levels 2\n"
        "family IC\n"
        "horizon 3\n"
        "init_fraction 0.15\n"
        "weight_upper 0.8\n"
        "repetitions 2\n"
        "seed 5\n"
        "agents 8\n"
        "stall 5\n"
        "max_iterations 20\n"
        "mc_runs 200\n"
        "report_mc_runs 500\n"
        "variance_fail_ratio 10.0\n"
    )
    out_dir = tmp_path / "out"
    assert main(["scenario", "--config", str(cfg),
                 "--out-dir", str(out_dir)]) == 0
    lines = (out_dir / "report.csv").read_text().splitlines()
    assert len(lines) == 1 + 2 + 1  # header, 2 repetitions, aggregate
    assert (out_dir / "timestep_errors.csv").exists()
    agg = tmp_path / "agg.csv"
    assert main(["report", str(out_dir / "report.csv"),
                 "--out", str(agg)]) == 0
    agg_lines = agg.read_text().splitlines()
    assert agg_lines[0] == "scenario_id,repetitions,mean_error,std_error"
    assert agg_lines[1].startswith("smoke,2,")


def test_scenario_byte_identical_across_threads(tmp_path):
    cfg = tmp_path / "scenario.cfg"
    cfg.write_text(
        "scenario_id det\ngraph_kind tree\ngraph_levels 2\nfamily IC\n"
        "horizon 3\ninit_fraction 0.2\nweight_upper 0.6\nrepetitions 1\n"
        "seed 8\nagents 8\nstall 4\nmax_iterations 12\nmc_runs 150\n"
        "report_mc_runs 300\nvariance_fail_ratio 10.0\n"
    )
    outs = []
    for threads in ("1", "2"):
        out_dir = tmp_path / f"o{threads}"
        assert main(["scenario", "--config", str(cfg), "--threads", threads,
                     "--out-dir", str(out_dir)]) == 0
        outs.append(out_dir)
    for name in ("report.csv", "timestep_errors.csv"):
        assert filecmp.cmp(outs[0] / name, outs[1] / name, shallow=False)


def test_usage_errors_exit_2(tmp_path, capsys):
    assert main(["gen", "tree", "--levels", "2"]) == 2  # missing --out
    assert main(["solve", "--graph", str(tmp_path / "missing.txt"),
                 "--observations", str(tmp_path / "also_missing.txt"),
                 "--family", "IC", "--horizon", "3",
                 "--out-dir", str(tmp_path)]) == 2
    err = capsys.readouterr().err
    assert err.splitlines()[-1].startswith("error: ")
    cfg = tmp_path / "bad.cfg"
    cfg.write_text("scenario_id x\nwarp 9\n")
    assert main(["scenario", "--config", str(cfg),
                 "--out-dir", str(tmp_path)]) == 2


def test_runtime_errors_exit_1(tmp_path, capsys):
    # degenerate binary reference: structurally valid input, solver rejects
    graph = tmp_path / "g.txt"
    main(["gen", "tree", "--levels", "1", "--out", str(graph)])
    obs = tmp_path / "o.txt"
    obs.write_text("obs binary 3 2\n0 1 1 1\n1 1 1 1\n")
    code = main(["solve", "--graph", str(graph), "--observations", str(obs),
                 "--family", "IC", "--horizon", "2",
                 "--out-dir", str(tmp_path / "out")])
    assert code == 1
    err = capsys.readouterr().err.splitlines()[-1]
    assert err.startswith("error: ") and "\n" not in err


def test_bad_family_exit_2(tmp_path, capsys):
    main(["gen", "tree", "--levels", "1", "--out", str(tmp_path / "g.txt")])
    obs = tmp_path / "o.txt"
    obs.write_text("obs real 3 2\n0 1 0 0\n1 1 0.5 0.5\n")
    assert main(["solve", "--graph", str(tmp_path / "g.txt"),
                 "--observations", str(obs), "--family", "SIRS",
                 "--horizon", "2", "--out-dir", str(tmp_path / "o")]) == 2
    assert "error:" in capsys.readouterr().err
