import subprocess
import sys

import numpy as np
import pytest

from polyconsensus import io
from polyconsensus.cli import main
from polyconsensus.graph import generate_rgg, path_graph
from polyconsensus.weights import metropolis_weights


@pytest.fixture
def graph_file(tmp_path):
    path = tmp_path / "g.txt"
    assert main(["gen-graph", "--n", "30", "--seed", "5", "--out", str(path)]) == 0
    return path


def test_gen_graph_matches_library(graph_file):
    assert io.read_graph(graph_file) == generate_rgg(30, 5)


def test_spectrum_csv(tmp_path, capsys):
    m = tmp_path / "W.txt"
    io.write_matrix(metropolis_weights(path_graph(3)), m)
    assert main(["spectrum", "--matrix", str(m)]) == 0
    lines = capsys.readouterr().out.splitlines()
    assert lines[0] == "index,eigenvalue"
    vals = [float(line.split(",")[1]) for line in lines[1:]]
    np.testing.assert_allclose(vals, [1, 2 / 3, 0], atol=1e-12)


def test_design_filter_static(tmp_path, capsys):
    m = tmp_path / "W.txt"
    io.write_matrix(metropolis_weights(path_graph(3)), m)
    assert main(["design-filter", "--matrix", str(m), "--k", "1"]) == 0
    line, s = capsys.readouterr().out.splitlines()
    f = io.parse_filter(line)
    np.testing.assert_allclose(f.coeffs, [-0.5, 1.5], atol=1e-12)
    assert s.startswith("s_star, ") and float(s.split(",")[1]) == pytest.approx(0.5)


def test_design_filter_dynamic_and_newton(graph_file, capsys):
    assert main(["design-filter", "--graph", str(graph_file), "--scheme", "laplacian",
                 "--mode", "dynamic", "--p", "0.8", "--k", "2"]) == 0
    assert main(["design-filter", "--graph", str(graph_file), "--filter", "newton",
                 "--a", "0", "--k", "3"]) == 0
    out = capsys.readouterr().out.splitlines()
    assert out[2] == "3, 0, 0, 0, 1"


@pytest.mark.parametrize("method", ["standard", "newton", "optimal", "sea"])
def test_run_static(graph_file, capsys, method):
    assert main(["run", "--graph", str(graph_file), "--method", method, "--k", "2",
                 "--max-iters", "30"]) == 0
    lines = capsys.readouterr().out.splitlines()
    assert lines[0] == "iteration,error"
    errs = [float(x.split(",")[1]) for x in lines[1:]]
    assert errs[-1] < errs[0]


def test_run_dynamic(graph_file, capsys):
    assert main(["run", "--graph", str(graph_file), "--method", "optimal", "--q", "0.2",
                 "--samples", "50", "--max-iters", "20"]) == 0
    assert main(["run", "--graph", str(graph_file), "--method", "sea", "--p", "0.5"]) == 1
    assert "error:" in capsys.readouterr().err


def test_experiment_with_config_file(tmp_path):
    cfg = tmp_path / "exp.cfg"
    cfg.write_text("k = 2, 3\n")
    out = tmp_path / "out"
    assert main(["experiment", "newton-shapes", "--config", str(cfg), "--out", str(out),
                 "--k", "4"]) == 0
    text = (out / "newton_shapes.csv").read_text()
    ks = {line.split(",")[0] for line in text.splitlines()[2:]}
    assert ks == {"4"}


def test_error_exit_codes(tmp_path, capsys):
    assert main(["spectrum"]) == 1
    assert main(["spectrum", "--matrix", str(tmp_path / "missing.txt")]) == 1
    bad = tmp_path / "bad.txt"
    bad.write_text("1 0\n0.5 0.5\n")
    assert main(["spectrum", "--matrix", str(bad)]) == 1
    assert main(["experiment", "static-convergence", "--n", "0", "--out", str(tmp_path)]) == 1
    err = capsys.readouterr().err.strip().splitlines()
    assert all(line.startswith("error: ") for line in err) and len(err) == 4
    with pytest.raises(SystemExit) as exc:
        main(["experiment", "nope"])
    assert exc.value.code == 2


def test_console_entry_point(tmp_path):
    res = subprocess.run([sys.executable, "-m", "polyconsensus.cli", "gen-graph", "--n", "10"],
                         capture_output=True, text=True)
    assert res.returncode == 0 and res.stdout.splitlines()[0] == "10"
