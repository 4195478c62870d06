"""Command-line interface.

Subcommands::

    gen-graph       write a connected random geometric graph (edge-list format)
    spectrum        print the sorted eigenvalues of a weight matrix as CSV
    design-filter   print a filter line ``k, a0, ..., ak`` and its radius s*
    run             simulate one consensus run and print its error trace
    experiment ID   run a named experiment (or ``all``) and write CSV tables

Weights: when a graph file is given instead of a matrix, ``--scheme`` picks the
construction. For ``laplacian`` the default step is ``gamma = 0.9 / d_max``
(``--gamma`` fixes it, ``--gamma-factor`` changes the 0.9).

Exit status is 0 on success and 1 with a one-line ``error:`` diagnostic on
any failure; argument errors exit with 2.
"""
from __future__ import annotations

import argparse
import sys
from pathlib import Path
from typing import Optional, Sequence

import numpy as np

from . import io
from .engine import SCHEDULES, DynamicNetwork, RunConfig, run_filtered, run_sea, run_standard
from .experiments import EXPERIMENTS, load_config_file, make_config, run_experiment
from .filters import newton_filter
from .graph import IidFailure, MarkovSwitch, generate_rgg
from .optimize import lp_minimax
from .spectral import check_convergence, deflated_eigenvalues, eig_sym
from .weights import DEFAULT_GAMMA_FACTOR, SCHEMES, WeightScheme, expected_weight_matrix

__all__ = ["main", "build_parser"]


class CliError(Exception):
    pass


def _out(text: str, path: Optional[str]) -> None:
    if path:
        Path(path).write_text(text)
    else:
        sys.stdout.write(text)


def _scheme(args) -> WeightScheme:
    return WeightScheme(args.scheme, args.gamma, args.gamma_factor)


def _load_topology(args):
    """Return ``(W, graph)``; ``graph`` is None when a matrix file was given."""
    if bool(args.matrix) == bool(args.graph):
        raise CliError("give exactly one of --matrix or --graph")
    if args.matrix:
        return io.read_matrix(args.matrix), None
    g = io.read_graph(args.graph)
    return _scheme(args).build(g), g


def _dynamic_model(args, g):
    if args.p is not None and args.q is not None:
        raise CliError("--p and --q are mutually exclusive")
    if args.p is not None:
        if g is None:
            raise CliError("--p (link failures) needs --graph")
        return IidFailure.uniform(g, args.p)
    if args.q is not None:
        n = g.n if g is not None else None
        if n is None:
            raise CliError("--q (Markov switching) needs --graph")
        return MarkovSwitch(args.q, n)
    return None


def _add_weight_args(p: argparse.ArgumentParser) -> None:
    src = p.add_argument_group("topology")
    src.add_argument("--matrix", help="dense weight matrix file")
    src.add_argument("--graph", help="edge-list graph file")
    src.add_argument("--scheme", choices=SCHEMES, default="metropolis",
                     help="weight construction for --graph (default: metropolis)")
    src.add_argument("--gamma", type=float, default=None,
                     help="fixed Laplacian step; default gamma_factor / d_max")
    src.add_argument("--gamma-factor", type=float, default=DEFAULT_GAMMA_FACTOR,
                     help=f"Laplacian step factor (default {DEFAULT_GAMMA_FACTOR})")


def _add_dynamic_args(p: argparse.ArgumentParser) -> None:
    p.add_argument("--p", type=float, default=None,
                   help="i.i.d. link-failure model: each edge of --graph present with probability p")
    p.add_argument("--q", type=float, default=None,
                   help="Markov-switch model: topology redrawn with probability q per step")
    p.add_argument("--samples", type=int, default=1000,
                   help="Monte Carlo samples for the expected weight matrix (default 1000)")


# ---------------------------------------------------------------------------
# subcommands
# ---------------------------------------------------------------------------

def cmd_gen_graph(args) -> None:
    g = generate_rgg(args.n, args.seed, args.radius)
    _out(io.format_graph(g), args.out)


def cmd_spectrum(args) -> None:
    W, _ = _load_topology(args)
    lam = eig_sym(W, args.method).eigenvalues
    _out(io.csv_text(("index", "eigenvalue"), enumerate(lam)), args.out)


def _design(args, W, g):
    model = _dynamic_model(args, g)
    if args.mode == "dynamic":
        if model is None:
            raise CliError("dynamic mode needs --p or --q")
        rng = np.random.default_rng(args.seed)
        W = expected_weight_matrix(model, _scheme(args), args.samples, rng=rng, current=g)
    elif model is not None:
        raise CliError("--p/--q only apply to --mode dynamic")
    report = check_convergence(W)
    if not report.converges:
        raise CliError(f"weight matrix fails the convergence conditions: {report}")
    lam = deflated_eigenvalues(W)
    if args.filter == "newton":
        a = float(np.min(lam)) if args.a == "auto" else float(args.a)
        f = newton_filter(args.k, a)
        s = float(np.abs(f(lam)).max()) if len(lam) else 0.0
        return f, s
    sol = lp_minimax(lam, args.k)
    return sol.filter, sol.s_star


def cmd_design_filter(args) -> None:
    W, g = _load_topology(args)
    f, s = _design(args, W, g)
    _out(f"{io.format_filter(f)}\ns_star, {io.fmt(s)}\n", args.out)


def cmd_run(args) -> None:
    W, g = _load_topology(args)
    n = W.shape[0]
    x0 = np.random.default_rng([args.seed, 1]).uniform(0.0, 1.0, n)
    model = _dynamic_model(args, g)
    topology = DynamicNetwork(model, _scheme(args), g) if model is not None else W
    cfg = RunConfig(args.max_iters, args.tol, args.schedule, args.seed)
    if args.method == "standard":
        trace = run_standard(topology, x0, cfg)
    elif args.method == "sea":
        if model is not None:
            raise CliError("sea needs a static topology")
        trace = run_sea(W, x0, cfg)
    else:
        # design on W (static) or on the expected matrix (dynamic)
        args.mode = "dynamic" if model is not None else "static"
        args.filter = args.method
        f, _ = _design(args, W, g)
        trace = run_filtered(topology, f, x0, cfg)
    _out(io.csv_text(("iteration", "error"), io.trace_rows(trace)), args.out)


_CONFIG_FLAGS = ("n", "seed", "scheme", "gamma", "gamma_factor", "k", "a", "q", "trials",
                 "tol", "max_iters", "samples", "schedule", "eps", "workers")


_CONFIG_HELP = {
    "n": "number of sensors",
    "seed": "master seed",
    "scheme": "weight scheme: " + ", ".join(SCHEMES),
    "gamma": "fixed Laplacian step (default 0.9 / d_max)",
    "gamma_factor": "Laplacian step factor when gamma is unset",
    "k": "comma-separated filter degrees",
    "a": "Newton endpoint, number or 'auto'",
    "q": "comma-separated Markov switch probabilities",
    "trials": "trials of the dynamic experiment",
    "tol": "relative error target reported in summary.csv",
    "max_iters": "iteration budget",
    "samples": "Monte Carlo samples for the expected weight matrix",
    "schedule": "filter schedule: " + ", ".join(SCHEDULES),
    "eps": "stop when successive iterates differ by less than this",
    "workers": "threads for dynamic trials",
}


def cmd_experiment(args) -> None:
    file_values = load_config_file(args.config) if args.config else {}
    overrides = {name: getattr(args, name) for name in _CONFIG_FLAGS}
    ids = sorted(EXPERIMENTS) if args.id == "all" else [args.id]
    outdir = Path(args.out)
    for exp in ids:
        cfg = make_config(exp, file_values, **overrides)
        target = outdir / exp if args.id == "all" else outdir
        for path in run_experiment(cfg, target):
            print(path)


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="polyconsensus", description=__doc__.split("\n\n")[0],
        epilog="Laplacian weights default to gamma = 0.9 / d_max.")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("gen-graph", help="generate a connected random geometric graph")
    p.add_argument("--n", type=int, default=50)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--radius", type=float, default=None, help="default sqrt(ln n / n)")
    p.add_argument("--out", help="output file (default stdout)")
    p.set_defaults(func=cmd_gen_graph)

    p = sub.add_parser("spectrum", help="sorted eigenvalues as CSV (index, eigenvalue)")
    _add_weight_args(p)
    p.add_argument("--method", choices=("jacobi", "lapack"), default="jacobi")
    p.add_argument("--out")
    p.set_defaults(func=cmd_spectrum)

    p = sub.add_parser("design-filter", help="print the filter line and s*")
    _add_weight_args(p)
    _add_dynamic_args(p)
    p.add_argument("--k", type=int, required=True)
    p.add_argument("--mode", choices=("static", "dynamic"), default="static")
    p.add_argument("--filter", choices=("optimal", "newton"), default="optimal")
    p.add_argument("--a", default="auto",
                   help="Newton endpoint; 'auto' = smallest deflated eigenvalue")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--out")
    p.set_defaults(func=cmd_design_filter)

    p = sub.add_parser("run", help="one consensus run; prints CSV (iteration, error)")
    _add_weight_args(p)
    _add_dynamic_args(p)
    p.add_argument("--method", choices=("standard", "newton", "optimal", "sea"), default="standard")
    p.add_argument("--k", type=int, default=2)
    p.add_argument("--a", default="auto")
    p.add_argument("--max-iters", type=int, default=60)
    p.add_argument("--tol", type=float, default=1e-12, help="stop when max |x_t+1 - x_t| < tol")
    p.add_argument("--schedule", choices=SCHEDULES, default="combine_then_step")
    p.add_argument("--seed", type=int, default=0, help="seeds x0 and the topology process")
    p.add_argument("--out")
    p.set_defaults(func=cmd_run)

    p = sub.add_parser("experiment", help="run a named experiment and write CSV tables",
                       description="Precedence: command-line flags > --config file > "
                                   "per-experiment defaults.")
    p.add_argument("id", choices=sorted(EXPERIMENTS) + ["all"])
    p.add_argument("--config", help="key = value file; keys are the flag names below")
    p.add_argument("--out", default="results", help="output directory (default ./results)")
    for name in _CONFIG_FLAGS:
        flag = "--" + name.replace("_", "-")
        p.add_argument(flag, dest=name, default=None, metavar=name.upper(), help=_CONFIG_HELP[name])
    p.set_defaults(func=cmd_experiment)
    return parser


def main(argv: Optional[Sequence[str]] = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        args.func(args)
    except (CliError, ValueError, RuntimeError, TypeError, OSError, KeyError) as exc:
        msg = str(exc).splitlines()[0] if str(exc) else type(exc).__name__
        print(f"error: {msg}", file=sys.stderr)
        return 1
    return 0


if __name__ == "__main__":
    sys.exit(main())
