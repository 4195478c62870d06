"""End-to-end convergence experiments emitting CSV tables.

Every experiment is a pure function of its :class:`ExperimentConfig`
(including the seed), so reruns produce byte-identical files.

Seeding: all streams come from ``numpy.random.default_rng([seed, tag, ...])``
with fixed integer tags, so no stream depends on how many draws another
stream made.
"""
from __future__ import annotations

import dataclasses
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from pathlib import Path
from typing import Callable, Dict, List, NamedTuple, Optional, Tuple, Union

import numpy as np

from .engine import (ConsensusTrace, DynamicNetwork, RunConfig, convergence_stats,
                     run_filtered, run_sea, run_standard)
from .filters import apply_to_spectrum, eval_filter, matrix_polynomial, newton_filter
from .graph import MarkovSwitch, generate_rgg
from .io import write_csv
from .optimize import lp_minimax
from .spectral import check_convergence, deflated_eigenvalues, eig_sym
from .weights import WeightScheme, check_weight_matrix, expected_weight_matrix

__all__ = [
    "EXPERIMENTS",
    "SCHEMA_VERSION",
    "ExperimentConfig",
    "InvariantError",
    "Table",
    "parse_config_text",
    "load_config_file",
    "make_config",
    "exp_newton_shapes",
    "exp_spectrum_effect",
    "exp_static_convergence",
    "exp_dynamic_convergence",
    "run_experiment",
]

SCHEMA_VERSION = 1


class InvariantError(RuntimeError):
    pass


class Table(NamedTuple):
    header: Tuple[str, ...]
    rows: list


Endpoint = Union[str, float]


@dataclass(frozen=True)
class ExperimentConfig:
    """Parameters of one experiment.

    ``a`` is the Newton filter's left endpoint; ``"auto"`` takes the smallest
    deflated eigenvalue of the matrix the filter is designed for. ``tol`` is
    the relative error target for ``summary.csv``; ``eps`` is the stopping
    threshold on successive iterates. ``gamma=None`` with the Laplacian
    scheme means ``gamma_factor / d_max`` per graph.
    """

    experiment: str = "static-convergence"
    n: int = 50
    seed: int = 0
    scheme: str = "laplacian"
    gamma: Optional[float] = None
    gamma_factor: float = 0.9
    k: Tuple[int, ...] = (2, 4, 6)
    a: Endpoint = "auto"
    q: Tuple[float, ...] = (1.0, 0.1, 0.3, 0.8)
    trials: int = 100
    tol: float = 1e-6
    max_iters: int = 600
    samples: int = 1000
    schedule: str = "combine_then_step"
    eps: float = 1e-15
    workers: int = 1

    def __post_init__(self):
        if self.experiment not in EXPERIMENTS:
            raise ValueError(f"unknown experiment {self.experiment!r}; choose from {sorted(EXPERIMENTS)}")
        for name in ("n", "trials", "max_iters", "samples", "workers"):
            if getattr(self, name) < 1:
                raise ValueError(f"{name} must be positive")
        if self.n < 2:
            raise ValueError("n must be at least 2")
        if not self.k or any(k < 0 for k in self.k):
            raise ValueError("k list must be non-empty and non-negative")
        if any(not 0.0 <= q <= 1.0 for q in self.q):
            raise ValueError("q values must lie in [0, 1]")
        if not self.tol > 0 or not self.eps > 0:
            raise ValueError("tol and eps must be positive")
        if self.a != "auto" and not isinstance(self.a, (int, float)):
            raise ValueError("a must be 'auto' or a number")
        self.weight_scheme()
        self.run_config()

    def weight_scheme(self) -> WeightScheme:
        return WeightScheme(self.scheme, self.gamma, self.gamma_factor)

    def run_config(self, seed: Optional[int] = None) -> RunConfig:
        return RunConfig(self.max_iters, self.eps, self.schedule, self.seed if seed is None else seed)


# per-experiment defaults layered between the dataclass defaults and user input
EXPERIMENT_DEFAULTS: Dict[str, dict] = {
    "newton-shapes": {"k": (1, 2, 3, 4, 5, 6), "a": 0.0},
    "spectrum-effect": {"scheme": "max-degree", "k": (4,)},
    "static-convergence": {"scheme": "laplacian", "k": (2, 4, 6), "max_iters": 600},
    "dynamic-convergence": {"scheme": "laplacian", "k": (1, 2), "q": (1.0, 0.1, 0.3, 0.8),
                            "trials": 100, "max_iters": 100},
}

_FIELDS = {f.name: f for f in dataclasses.fields(ExperimentConfig)}


def _coerce(name: str, value):
    if not isinstance(value, str):
        return tuple(value) if name in ("k", "q") and not isinstance(value, tuple) else value
    v = value.strip()
    if name in ("experiment", "scheme", "schedule"):
        return v
    if name in ("n", "seed", "trials", "max_iters", "samples", "workers"):
        return int(v)
    if name in ("gamma_factor", "tol", "eps"):
        return float(v)
    if name == "gamma":
        return None if v.lower() in ("", "none", "auto") else float(v)
    if name == "a":
        return "auto" if v.lower() == "auto" else float(v)
    if name == "k":
        return tuple(int(p) for p in v.split(",") if p.strip())
    if name == "q":
        return tuple(float(p) for p in v.split(",") if p.strip())
    raise KeyError(name)


def parse_config_text(text: str) -> dict:
    """Parse ``key = value`` lines (``#`` starts a comment) into raw strings."""
    out = {}
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ValueError(f"config line {lineno}: expected key = value")
        key, value = (p.strip() for p in line.split("=", 1))
        key = key.replace("-", "_")
        if key not in _FIELDS:
            raise ValueError(f"config line {lineno}: unknown key {key!r}")
        out[key] = value
    return out


def load_config_file(path) -> dict:
    return parse_config_text(Path(path).read_text())


def make_config(experiment: Optional[str] = None, file_values: Optional[dict] = None,
                **overrides) -> ExperimentConfig:
    """Merge defaults < experiment defaults < file values < overrides."""
    file_values = dict(file_values or {})
    overrides = {k: v for k, v in overrides.items() if v is not None}
    exp = overrides.get("experiment") or experiment or file_values.get("experiment") or "static-convergence"
    merged = {"experiment": exp}
    merged.update(EXPERIMENT_DEFAULTS.get(exp, {}))
    for source in (file_values, overrides):
        for key, value in source.items():
            key = key.replace("-", "_")
            if key not in _FIELDS:
                raise ValueError(f"unknown config key {key!r}")
            merged[key] = _coerce(key, value)
    merged["experiment"] = exp
    return ExperimentConfig(**merged)


# ---------------------------------------------------------------------------
# helpers
# ---------------------------------------------------------------------------

def _rng(cfg, *tags):
    return np.random.default_rng([cfg.seed, *tags])


def _checked_weights(scheme: WeightScheme, g):
    W = scheme.build(g)
    problems = check_weight_matrix(W, g)
    if problems:
        raise InvariantError(f"{scheme} weights violate invariants: {', '.join(problems)}")
    report = check_convergence(W)
    if not report.converges:
        raise InvariantError(f"{scheme} weights do not converge: {report}")
    return W


def _endpoint(cfg, deflated) -> float:
    return float(np.min(deflated)) if cfg.a == "auto" else float(cfg.a)


def _status(errors, tol) -> str:
    if errors[-1] <= tol * errors[0]:
        return "reached"
    if errors[-1] > errors[0]:
        return "diverged"
    return "not_reached"


def _summary_row(cfg, method, k, q, errors):
    st = convergence_stats(errors, cfg.tol)
    return (cfg.experiment, str(cfg.weight_scheme()), method, k, q,
            st.iterations_to_tol, errors[-1], st.factor, _status(errors, cfg.tol))


SUMMARY_HEADER = ("experiment", "scheme", "method", "k", "q", "iterations_to_tol",
                  "final_error", "factor", "status")


# ---------------------------------------------------------------------------
# experiments
# ---------------------------------------------------------------------------

def exp_newton_shapes(cfg: ExperimentConfig) -> Dict[str, Table]:
    """Newton filters of each degree on a 201-point grid of [0, 1]."""
    a = 0.0 if cfg.a == "auto" else float(cfg.a)
    grid = np.linspace(0.0, 1.0, 201)
    rows = []
    for k in cfg.k:
        if k < 1:
            continue
        vals = eval_filter(newton_filter(k, a), grid)
        rows += [(k, lam, v) for lam, v in zip(grid, vals)]
    return {"newton_shapes.csv": Table(("k", "lambda", "value"), rows)}


def exp_spectrum_effect(cfg: ExperimentConfig) -> Dict[str, Table]:
    """Spectrum of W before and after the optimal filter, both sorted descending."""
    g = generate_rgg(cfg.n, _rng(cfg, 0))
    W = _checked_weights(cfg.weight_scheme(), g)
    before = eig_sym(W).eigenvalues
    lam = deflated_eigenvalues(W)
    k = cfg.k[0]
    sol = lp_minimax(lam, k)
    after = eig_sym(matrix_polynomial(sol.filter, W)).eigenvalues
    spectrum = [(i, b, a) for i, (b, a) in enumerate(zip(before, after))]
    grid = np.linspace(before.min(), 1.0, 201)
    curve = [(x, v) for x, v in zip(grid, apply_to_spectrum(sol.filter, grid))]
    coeffs = [(k, i, c) for i, c in enumerate(sol.filter.coeffs)]
    summary = [(cfg.experiment, str(cfg.weight_scheme()), "unfiltered", None, None, None,
                float(np.abs(lam).max()), None, "radius"),
               (cfg.experiment, str(cfg.weight_scheme()), "optimal", k, None, None,
                sol.s_star, None, "radius")]
    return {
        "spectrum_effect.csv": Table(("index", "eigenvalue_before", "eigenvalue_after"), spectrum),
        "spectrum_filter.csv": Table(("lambda", "value"), curve),
        "spectrum_filter_coeffs.csv": Table(("k", "power", "coefficient"), coeffs),
        "summary.csv": Table(SUMMARY_HEADER, summary),
    }


def exp_static_convergence(cfg: ExperimentConfig) -> Dict[str, Table]:
    """Standard, SEA, Newton-filtered and optimal-filtered runs on one network."""
    g = generate_rgg(cfg.n, _rng(cfg, 0))
    W = _checked_weights(cfg.weight_scheme(), g)
    x0 = _rng(cfg, 1).uniform(0.0, 1.0, cfg.n)
    lam = deflated_eigenvalues(W)
    a = _endpoint(cfg, lam)
    run = cfg.run_config()
    traces: List[Tuple[str, Optional[int], ConsensusTrace]] = [
        ("standard", None, run_standard(W, x0, run)),
        ("sea", None, run_sea(W, x0, run)),
    ]
    for k in cfg.k:
        if k >= 1:
            traces.append(("newton", k, run_filtered(W, newton_filter(k, a), x0, run)))
        traces.append(("optimal", k, run_filtered(W, lp_minimax(lam, k).filter, x0, run)))
    rows, summary = [], []
    for method, k, tr in traces:
        rows += [(method, k, t, e) for t, e in enumerate(tr.errors)]
        summary.append(_summary_row(cfg, method, k, None, tr.errors))
    return {
        "static_convergence.csv": Table(("method", "k", "iteration", "error"), rows),
        "summary.csv": Table(SUMMARY_HEADER, summary),
    }


def _pad(errors, length):
    errors = np.asarray(errors, dtype=float)
    if len(errors) >= length:
        return errors[:length]
    # a stopped run keeps its final estimate
    return np.concatenate([errors, np.full(length - len(errors), errors[-1])])


def _dynamic_trial(cfg, scheme, fresh_mean, trial):
    rng = _rng(cfg, 3, trial)
    g0 = generate_rgg(cfg.n, rng)
    x0 = rng.uniform(0.0, 1.0, cfg.n)
    run_seed = int(rng.integers(2 ** 63))
    run = cfg.run_config(seed=run_seed)
    length = cfg.max_iters + 1
    out = []
    for q in cfg.q:
        model = MarkovSwitch(q, cfg.n)
        net = DynamicNetwork(model, scheme, g0)
        W_bar = expected_weight_matrix(model, scheme, current=g0, fresh_mean=fresh_mean)
        lam = deflated_eigenvalues(W_bar)
        a = _endpoint(cfg, lam)
        out.append(("standard", None, q, _pad(run_standard(net, x0, run).errors, length)))
        for k in cfg.k:
            if k >= 1:
                out.append(("newton", k, q,
                            _pad(run_filtered(net, newton_filter(k, a), x0, run).errors, length)))
            opt = lp_minimax(lam, k).filter
            out.append(("optimal", k, q, _pad(run_filtered(net, opt, x0, run).errors, length)))
    return out


def exp_dynamic_convergence(cfg: ExperimentConfig) -> Dict[str, Table]:
    """Markov-switching topologies: per-trial traces plus per-iteration medians."""
    scheme = cfg.weight_scheme()
    fresh_mean = expected_weight_matrix(MarkovSwitch(1.0, cfg.n), scheme, cfg.samples,
                                        rng=_rng(cfg, 2))
    trials = range(cfg.trials)
    if cfg.workers > 1:
        with ThreadPoolExecutor(cfg.workers) as pool:
            results = list(pool.map(lambda t: _dynamic_trial(cfg, scheme, fresh_mean, t), trials))
    else:
        results = [_dynamic_trial(cfg, scheme, fresh_mean, t) for t in trials]

    rows = []
    grouped: Dict[tuple, list] = {}
    for trial, res in enumerate(results):
        for method, k, q, errors in res:
            rows += [(method, k, q, trial, t, e) for t, e in enumerate(errors)]
            grouped.setdefault((method, k, q), []).append(errors)
    median_rows, summary = [], []
    for (method, k, q), runs in grouped.items():
        med = np.median(np.vstack(runs), axis=0)
        median_rows += [(method, k, q, t, e) for t, e in enumerate(med)]
        summary.append(_summary_row(cfg, method, k, q, med))
    return {
        "dynamic_convergence.csv": Table(("method", "k", "q", "trial", "iteration", "error"), rows),
        "dynamic_median.csv": Table(("method", "k", "q", "iteration", "median_error"), median_rows),
        "summary.csv": Table(SUMMARY_HEADER, summary),
    }


EXPERIMENTS: Dict[str, Callable[[ExperimentConfig], Dict[str, Table]]] = {
    "newton-shapes": exp_newton_shapes,
    "spectrum-effect": exp_spectrum_effect,
    "static-convergence": exp_static_convergence,
    "dynamic-convergence": exp_dynamic_convergence,
}


def run_experiment(cfg: ExperimentConfig, outdir) -> List[Path]:
    """Run one experiment and write its tables into ``outdir``; returns the written paths."""
    tables = EXPERIMENTS[cfg.experiment](cfg)
    outdir = Path(outdir)
    outdir.mkdir(parents=True, exist_ok=True)
    written = []
    for name, table in tables.items():
        path = outdir / name
        stem = name[:-4] if name.endswith(".csv") else name
        write_csv(path, table.header, table.rows,
                  comment=f"polyconsensus {stem} schema v{SCHEMA_VERSION}")
        written.append(path)
    return written
