import csv
from math import comb

import numpy as np
import pytest

from polyconsensus.experiments import (EXPERIMENTS, ExperimentConfig, exp_dynamic_convergence,
                                       exp_newton_shapes, exp_spectrum_effect,
                                       exp_static_convergence, make_config, parse_config_text,
                                       run_experiment)
from polyconsensus.filters import apply_to_spectrum, PolynomialFilter


def read_table(path):
    with open(path) as fh:
        first = fh.readline()
        assert first.startswith("# polyconsensus ") and "schema v1" in first
        return list(csv.DictReader(fh))


def test_newton_shapes():
    t = exp_newton_shapes(make_config("newton-shapes"))["newton_shapes.csv"]
    rows = {(k, round(lam, 12)): v for k, lam, v in t.rows}
    assert rows[(2, 0.5)] == pytest.approx(0.25)
    assert all(rows[(k, 1.0)] == pytest.approx(1.0) for k in range(1, 7))
    assert sum(1 for r in t.rows if r[0] == 5) == 201
    for lam in np.linspace(0, 1, 201):
        # binomial expansion of (lam - 0)^5 around 0.5: sum C(5,i) (lam-.5)^i .5^(5-i)
        ref = sum(comb(5, i) * (lam - 0.5) ** i * 0.5 ** (5 - i) for i in range(6))
        assert rows[(5, round(lam, 12))] == pytest.approx(ref, abs=1e-14)


@pytest.fixture(scope="module")
def spectrum_tables():
    return exp_spectrum_effect(make_config("spectrum-effect"))


def test_spectrum_effect(spectrum_tables):
    rows = spectrum_tables["spectrum_effect.csv"].rows
    before = np.array([r[1] for r in rows])
    after = np.array([r[2] for r in rows])
    assert before[0] == pytest.approx(1, abs=1e-10) and after[0] == pytest.approx(1, abs=1e-8)
    assert np.abs(after[1:]).max() < np.abs(before[1:]).max()
    coeffs = [c for _, _, c in spectrum_tables["spectrum_filter_coeffs.csv"].rows]
    mapped = np.sort(apply_to_spectrum(PolynomialFilter(coeffs), before))[::-1]
    np.testing.assert_allclose(mapped, after, atol=1e-8)


def test_static_convergence_shares_x0_and_trends():
    tables = exp_static_convergence(make_config("static-convergence"))
    rows = tables["static_convergence.csv"].rows
    starts = {(m, k): e for m, k, t, e in rows if t == 0}
    assert len(set(starts.values())) == 1
    summary = {(r[2], r[3]): r[5] for r in tables["summary.csv"].rows}
    opt = [summary[("optimal", k)] for k in (2, 4, 6)]
    assert opt[0] > opt[1] > opt[2]
    assert summary[("optimal", 4)] < summary[("newton", 4)]


def test_dynamic_q0_reduces_to_static():
    cfg = make_config("dynamic-convergence", q="0", trials=2, k="1", max_iters=30)
    tables = exp_dynamic_convergence(cfg)
    from polyconsensus.engine import run_standard
    from polyconsensus.experiments import _rng
    from polyconsensus.graph import generate_rgg
    rng = _rng(cfg, 3, 0)
    g0 = generate_rgg(cfg.n, rng)
    x0 = rng.uniform(0, 1, cfg.n)
    W = cfg.weight_scheme().build(g0)
    ref = run_standard(W, x0, cfg.run_config()).errors
    got = [e for m, k, q, trial, t, e in tables["dynamic_convergence.csv"].rows
           if m == "standard" and trial == 0]
    np.testing.assert_array_equal(got[:len(ref)], ref)


def test_run_experiment_writes_versioned_csv(tmp_path):
    paths = run_experiment(make_config("newton-shapes", k="2,3"), tmp_path)
    assert [p.name for p in paths] == ["newton_shapes.csv"]
    rows = read_table(paths[0])
    assert set(rows[0]) == {"k", "lambda", "value"}


def test_config_precedence():
    file_values = parse_config_text("# comment\nn = 30\nk = 1, 2\nseed=4\n")
    cfg = make_config("static-convergence", file_values, seed=9)
    assert cfg.n == 30 and cfg.k == (1, 2) and cfg.seed == 9
    assert cfg.max_iters == 600 and cfg.scheme == "laplacian"
    assert make_config("dynamic-convergence").max_iters == 100
    assert make_config("spectrum-effect").scheme == "max-degree"


@pytest.mark.parametrize("text", ["bogus = 1", "n 30"])
def test_config_parse_errors(text):
    with pytest.raises(ValueError):
        parse_config_text(text)


@pytest.mark.parametrize("kw", [dict(n=0), dict(q=(1.5,)), dict(trials=0), dict(k=()),
                                dict(experiment="nope"), dict(scheme="uniform"), dict(tol=0.0)])
def test_config_invariants(kw):
    with pytest.raises(ValueError):
        ExperimentConfig(**kw)


def test_registry():
    assert set(EXPERIMENTS) == {"newton-shapes", "spectrum-effect", "static-convergence",
                                "dynamic-convergence"}
