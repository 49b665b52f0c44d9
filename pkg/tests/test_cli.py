import json

import pytest

from dvbc.cli import ExperimentConfig, main, trace_lines
from dvbc.graph import generate, parse_generator_spec, read_edge_list


@pytest.fixture
def c6_file(tmp_path):
    path = tmp_path / "c6.txt"
    assert main(["gen", "cycle:n=6", "-o", str(path)]) == 0
    return path


def read_json(path):
    return json.loads(path.read_text())


def test_gen_roundtrip(tmp_path):
    for spec, weights in [("cycle:n=6", "unit"), ("hypercube:d=5", "unit"),
                          ("erdos_renyi:n=80,p=0.06", "random")]:
        out = tmp_path / "g.txt"
        assert main(["gen", spec, "--weights", weights, "--seed", "4", "-o", str(out)]) == 0
        family, params = parse_generator_spec(spec)
        assert read_edge_list(out).edges == generate(family, params, weights, 4).edges


def test_run_c6_summary(c6_file, tmp_path, capsys):
    out = tmp_path / "run"
    assert main(["run", "--graph", str(c6_file), "--out", str(out)]) == 0
    s = read_json(out / "summary.json")
    assert s["quiescence_phase"] <= 7 and s["bound"] == 7 and s["bound_ok"]
    assert s["Diam"] == 3 and s["oracle_ok"] and s["final_error"] == 0.0
    for name in ("errors.csv", "nodes.csv", "histogram.csv", "config.json"):
        assert (out / name).exists()
    assert json.loads(capsys.readouterr().out)["bound_ok"]


def test_run_rational_and_reference(c6_file, tmp_path):
    out = tmp_path / "r"
    assert main(["run", "--graph", str(c6_file), "--mode", "reference", "--arithmetic", "rational",
                 "--out", str(out)]) == 0
    assert read_json(out / "summary.json")["oracle_ok"]


def test_file_and_generator_runs_match(c6_file, tmp_path):
    a, b = tmp_path / "a", tmp_path / "b"
    assert main(["run", "--graph", str(c6_file), "--out", str(a)]) == 0
    assert main(["run", "--generate", "cycle:n=6", "--out", str(b)]) == 0
    for name in ("errors.csv", "nodes.csv", "histogram.csv"):
        assert (a / name).read_text() == (b / name).read_text()


def test_weighted_file_roundtrip(tmp_path):
    path = tmp_path / "er.txt"
    assert main(["gen", "erdos_renyi:n=40,p=0.12", "--weights", "random", "--seed", "3", "-o", str(path)]) == 0
    a, b = tmp_path / "a", tmp_path / "b"
    assert main(["run", "--graph", str(path), "--out", str(a)]) == 0
    assert main(["run", "--generate", "erdos_renyi:n=40,p=0.12", "--weights", "random", "--seed", "3",
                 "--out", str(b)]) == 0
    for name in ("errors.csv", "nodes.csv", "histogram.csv"):
        assert (a / name).read_text() == (b / name).read_text()


def test_config_file(tmp_path):
    cfg = ExperimentConfig(generator="grid:w=4,h=3", mode="reference", order="shuffle", shuffle_seed=5,
                           out=str(tmp_path / "out"))
    path = tmp_path / "cfg.json"
    path.write_text(cfg.to_json())
    assert ExperimentConfig.load(path) == cfg
    assert main(["run", "--config", str(path)]) == 0
    s = read_json(tmp_path / "out" / "summary.json")
    assert s["order"] == "shuffle" and s["mode"] == "reference"
    assert read_json(tmp_path / "out" / "config.json") == json.loads(cfg.to_json())


def test_bad_config(tmp_path, capsys):
    path = tmp_path / "cfg.json"
    path.write_text(json.dumps({"generator": "cycle:n=5", "colour": "blue"}))
    assert main(["run", "--config", str(path)]) == 2
    err = json.loads(capsys.readouterr().err)
    assert err["error"] == "input" and "colour" in err["message"]


def test_invalid_graph_file(tmp_path, capsys):
    path = tmp_path / "bad.txt"
    path.write_text("0 1 1\n1 2\n")
    assert main(["run", "--graph", str(path), "--out", str(tmp_path / "o")]) == 2
    err = json.loads(capsys.readouterr().err)
    assert "line 2" in err["message"] and err["exit_code"] == 2


def test_missing_file(tmp_path, capsys):
    assert main(["oracle", str(tmp_path / "nope.txt")]) == 2
    assert json.loads(capsys.readouterr().err)["error"] in ("input", "io")


def test_nonconvergence_exit(c6_file, tmp_path, capsys):
    assert main(["run", "--graph", str(c6_file), "--max-phases", "2", "--out", str(tmp_path / "o")]) == 3
    assert json.loads(capsys.readouterr().err)["error"] == "non_convergence"


def test_oracle_csv(c6_file, tmp_path, capsys):
    assert main(["oracle", str(c6_file)]) == 0
    lines = capsys.readouterr().out.splitlines()
    assert lines[0] == "node_id,degree,ecc_hop,bc_raw,bc,f_v"
    assert len(lines) == 7
    assert all(line.split(",")[4] == "0.2" for line in lines[1:])


def test_oracle_star_and_path(tmp_path, capsys):
    star = tmp_path / "star.txt"
    main(["gen", "star:k=4", "-o", str(star)])
    main(["oracle", str(star)])
    rows = [line.split(",") for line in capsys.readouterr().out.splitlines()[1:]]
    assert rows[0][4] == "1.0" and all(r[4] == "0.0" and r[5] == "inf" for r in rows[1:])
    p3 = tmp_path / "p3.txt"
    p3.write_text("0 1 1\n1 2 1\n")
    main(["oracle", str(p3)])
    rows = [line.split(",") for line in capsys.readouterr().out.splitlines()[1:]]
    assert [r[4] for r in rows] == ["0.0", "1.0", "0.0"]


def test_trace_c6(c6_file, tmp_path):
    out = tmp_path / "trace.jsonl"
    assert main(["trace", str(c6_file), "-o", str(out)]) == 0
    recs = [json.loads(line) for line in out.read_text().splitlines()]
    at = {(r["phase"], r["node"]): r["state"] for r in recs}
    s4 = at[(4, 5)]
    assert s4["D"][3] == "2" and s4["NH"][3] == [4] and s4["PH"][3] == [0] and s4["S"]["5"][3] == 1
    assert s4["B"]["5"][3] == "inf"
    assert at[(5, 5)]["B"]["5"][3] == 0.5
    assert at[(7, 5)]["B"]["5"][3] == 0.5
    assert set(s4) == {"D", "NH", "PH", "S", "B", "C"}


def test_trace_phase_limit():
    lines = trace_lines(generate("cycle", {"n": 4}), phases=2)
    assert {json.loads(x)["phase"] for x in lines} == {0, 1, 2}


def test_trace_empty_graph(tmp_path, capsys):
    path = tmp_path / "empty.txt"
    path.write_text("")
    assert main(["trace", str(path)]) == 2
    assert "empty" in json.loads(capsys.readouterr().err)["message"]


def test_sweep(tmp_path, capsys):
    out = tmp_path / "sweep"
    args = ["sweep", "--generate", "erdos_renyi:n=30,p=0.15", "--weights", "random", "--samples", "3",
            "--seed", "7", "--order", "shuffle", "--out", str(out)]
    assert main(args) == 0
    first = (out / "sweep.csv").read_text()
    assert len(first.splitlines()) == 4
    assert (out / "mean_error.csv").read_text().startswith("phase,mean_global_error\n0,1.0\n")
    assert main(args) == 0
    assert (out / "sweep.csv").read_text() == first


def test_sweep_needs_generator(c6_file, tmp_path):
    assert main(["sweep", "--graph", str(c6_file), "--out", str(tmp_path / "o")]) == 2
