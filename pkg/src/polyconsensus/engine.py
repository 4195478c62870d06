"""Consensus iterations: standard, polynomial-filtered, and scalar-epsilon extrapolation."""
from __future__ import annotations

from collections import deque
from dataclasses import dataclass, field
from typing import Iterator, Optional, Union

import numpy as np

from .filters import PolynomialFilter
from .graph import DynamicModel, Graph, _as_rng, topology_sequence
from .weights import WeightScheme

__all__ = [
    "SCHEDULES",
    "RunConfig",
    "ConsensusTrace",
    "ConvergenceStats",
    "DynamicNetwork",
    "weight_sequence",
    "run_standard",
    "run_filtered",
    "run_sea",
    "convergence_stats",
    "SEA_GUARD",
]

# "combine_then_step": at every (k+1)-th iteration each node forms the filter
#     combination of its last k+1 values and then does one neighbour-weighted
#     update, so one period applies W p(W).
# "combine_replace": the combination replaces that iteration's update, so one
#     period applies p(W).
SCHEDULES = ("combine_then_step", "combine_replace")

SEA_GUARD = 1e-13


@dataclass(frozen=True)
class RunConfig:
    max_iters: int = 60
    tol: float = 1e-12
    schedule: str = "combine_then_step"
    seed: Optional[int] = 0
    record_states: bool = False

    def __post_init__(self):
        if self.max_iters < 1:
            raise ValueError("max_iters must be >= 1")
        if not self.tol > 0:
            raise ValueError("tol must be positive")
        if self.schedule not in SCHEDULES:
            raise ValueError(f"unknown schedule {self.schedule!r}; choose from {SCHEDULES}")


@dataclass(eq=False)
class ConsensusTrace:
    """Error history ``errors[t] = ||x_t - mu 1||_2`` of one run."""

    errors: np.ndarray
    iterations: int
    final_state: np.ndarray
    mu: float
    states: Optional[np.ndarray] = field(default=None, repr=False)


@dataclass(frozen=True)
class ConvergenceStats:
    iterations_to_tol: Optional[int]
    factor: float


@dataclass(frozen=True)
class DynamicNetwork:
    """A dynamic topology model together with the weight scheme used on each realization.

    ``initial`` seeds Markov-switching models (a fresh graph is drawn if it
    is ``None``); it is ignored for i.i.d. link failures.
    """

    model: DynamicModel
    scheme: WeightScheme
    initial: Optional[Graph] = None


Topology = Union[np.ndarray, DynamicNetwork]


def weight_sequence(topology: Topology, rng) -> Iterator[np.ndarray]:
    """Infinite iterator of the weight matrices W_0, W_1, ... used at each step."""
    if isinstance(topology, DynamicNetwork):
        last_g, W = None, None
        for g in topology_sequence(topology.model, topology.initial, rng, steps=2 ** 62):
            if g is not last_g:
                last_g, W = g, topology.scheme.build(g)
            yield W
    else:
        W = np.asarray(topology, dtype=float)
        while True:
            yield W


def _prepare(topology, x0, cfg):
    x0 = np.asarray(x0, dtype=float).copy()
    if x0.ndim != 1:
        raise ValueError("x0 must be a vector")
    if not isinstance(topology, DynamicNetwork):
        W = np.asarray(topology, dtype=float)
        if W.shape != (len(x0), len(x0)):
            raise ValueError(f"W has shape {W.shape} but x0 has length {len(x0)}")
    rng = _as_rng(cfg.seed)
    return x0, float(x0.mean()), rng


def _finish(errors, x, mu, states):
    errs = np.array(errors)
    st = np.array(states) if states is not None else None
    return ConsensusTrace(errs, len(errs) - 1, x, mu, st)


def run_standard(topology: Topology, x0, cfg: RunConfig = RunConfig()) -> ConsensusTrace:
    """``x_{t+1} = W_t x_t`` until ``max |x_{t+1} - x_t| < tol`` or ``max_iters``."""
    x, mu, rng = _prepare(topology, x0, cfg)
    weights = weight_sequence(topology, rng)
    errors = [np.linalg.norm(x - mu)]
    states = [x.copy()] if cfg.record_states else None
    for _ in range(cfg.max_iters):
        x_new = next(weights) @ x
        errors.append(np.linalg.norm(x_new - mu))
        if states is not None:
            states.append(x_new.copy())
        done = np.abs(x_new - x).max() < cfg.tol
        x = x_new
        if done:
            break
    return _finish(errors, x, mu, states)


def run_filtered(topology: Topology, f: PolynomialFilter, x0,
                 cfg: RunConfig = RunConfig()) -> ConsensusTrace:
    """Polynomial-filtered consensus.

    Every node keeps only its last k+1 values. At iterations t with
    ``t % (k+1) == 0`` it forms ``alpha_0 x_{t-k-1} + ... + alpha_k x_{t-1}``;
    under ``combine_then_step`` one weighted neighbour update follows, under
    ``combine_replace`` the combination is the new value. Other iterations
    are plain updates.
    """
    if not f.is_consensus_preserving():
        raise ValueError("filter coefficients must sum to 1")
    x, mu, rng = _prepare(topology, x0, cfg)
    weights = weight_sequence(topology, rng)
    k = f.k
    alpha = f.coeffs
    memory = deque([x.copy()], maxlen=k + 1)
    errors = [np.linalg.norm(x - mu)]
    states = [x.copy()] if cfg.record_states else None
    for t in range(1, cfg.max_iters + 1):
        W = next(weights)
        if t % (k + 1) == 0:
            y = alpha[0] * memory[0]
            for a, v in zip(alpha[1:], list(memory)[1:]):
                y = y + a * v
            x_new = W @ y if cfg.schedule == "combine_then_step" else y
        else:
            x_new = W @ x
        memory.append(x_new)
        errors.append(np.linalg.norm(x_new - mu))
        if states is not None:
            states.append(x_new.copy())
        done = np.abs(x_new - x).max() < cfg.tol
        x = x_new
        if done:
            break
    return _finish(errors, x, mu, states)


def _epsilon_antidiagonal(prev, x_new, guard):
    """Next antidiagonal of the epsilon table after appending ``x_new``.

    ``prev[r]`` holds eps_r for the previous antidiagonal. Entries whose
    denominator falls below ``guard`` become NaN, which freezes every entry
    derived from them.
    """
    new = [x_new]
    for r in range(1, len(prev) + 1):
        diff = new[r - 1] - prev[r - 1]
        base = prev[r - 2] if r >= 2 else 0.0
        with np.errstate(divide="ignore", invalid="ignore"):
            val = base + 1.0 / diff
        val = np.where(np.abs(diff) < guard, np.nan, val)
        new.append(val)
    return new


def _sea_estimate(diag):
    evens = np.array(diag[0::2])
    finite = np.isfinite(evens)
    # highest even column with a finite entry, per component
    idx = evens.shape[0] - 1 - np.argmax(finite[::-1], axis=0)
    return evens[idx, np.arange(evens.shape[1])]


def run_sea(W, x0, cfg: RunConfig = RunConfig(), guard: float = SEA_GUARD) -> ConsensusTrace:
    """Scalar epsilon algorithm applied componentwise to ``x_t = W^t x_0``.

    The estimate after t iterations is the highest even column entry of the
    latest antidiagonal of the epsilon table, which uses the whole history
    ``x_0 .. x_t`` (O(t) memory per node). Static topologies only.
    """
    if isinstance(W, DynamicNetwork):
        raise TypeError("the scalar epsilon algorithm needs a fixed weight matrix")
    x, mu, _ = _prepare(W, x0, cfg)
    W = np.asarray(W, dtype=float)
    diag = [x.copy()]
    est = x.copy()
    errors = [np.linalg.norm(est - mu)]
    states = [est.copy()] if cfg.record_states else None
    for _ in range(cfg.max_iters):
        x = W @ x
        diag = _epsilon_antidiagonal(diag, x, guard)
        est_new = _sea_estimate(diag)
        errors.append(np.linalg.norm(est_new - mu))
        if states is not None:
            states.append(est_new.copy())
        done = np.abs(est_new - est).max() < cfg.tol
        est = est_new
        if done:
            break
    return _finish(errors, est, mu, states)


def convergence_stats(trace, tol: float, stride: int = 1) -> ConvergenceStats:
    """Iterations until ``errors[t] <= tol * errors[0]`` and the empirical step factor.

    The factor is the geometric-mean ratio over the second half of the trace
    (sampled every ``stride`` iterations, so ``stride=k+1`` gives a per-period
    factor expressed per step).
    """
    errors = np.asarray(trace.errors if isinstance(trace, ConsensusTrace) else trace, dtype=float)
    if errors.size == 0:
        raise ValueError("empty trace")
    hit = np.nonzero(errors <= tol * errors[0])[0]
    first = int(hit[0]) if hit.size else None
    sampled = errors[::stride]
    if len(sampled) < 2:
        return ConvergenceStats(first, float("nan"))
    start = (len(sampled) - 1) // 2
    end = len(sampled) - 1
    e0, e1 = sampled[start], sampled[end]
    if e0 == 0.0:
        factor = 0.0
    else:
        factor = float((e1 / e0) ** (1.0 / ((end - start) * stride)))
    return ConvergenceStats(first, factor)
