"""Consensus weight matrices built from a topology.

Matrices are dense, symmetric ``(n, n)`` float arrays. Three classic
constructions are provided (maximum-degree, Metropolis, Laplacian) plus the
expected weight matrix of a dynamic topology model.
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import Optional

import numpy as np

from .graph import Graph, IidFailure, MarkovSwitch, _as_rng, degrees, sample_topology

__all__ = [
    "SCHEMES",
    "DEFAULT_GAMMA_FACTOR",
    "WeightScheme",
    "max_degree_weights",
    "metropolis_weights",
    "laplacian_weights",
    "expected_weight_matrix",
    "check_weight_matrix",
]

SCHEMES = ("max-degree", "metropolis", "laplacian")

# Laplacian step when no gamma is given: gamma = DEFAULT_GAMMA_FACTOR / d_max
DEFAULT_GAMMA_FACTOR = 0.9


def max_degree_weights(g: Graph) -> np.ndarray:
    """``W_ij = 1/n`` on edges, ``W_ii = 1 - d(i)/n``."""
    W = g.adjacency() / g.n
    np.fill_diagonal(W, 1.0 - degrees(g) / g.n)
    return W


def metropolis_weights(g: Graph) -> np.ndarray:
    """``W_ij = 1 / (1 + max(d(i), d(j)))`` on edges, rows completed to 1 on the diagonal."""
    d = degrees(g)
    W = np.zeros((g.n, g.n))
    if g.num_edges:
        i, j = g.edges[:, 0], g.edges[:, 1]
        w = 1.0 / (1.0 + np.maximum(d[i], d[j]))
        W[i, j] = w
        W[j, i] = w
    np.fill_diagonal(W, 1.0 - W.sum(axis=1))
    return W


def laplacian_weights(g: Graph, gamma: float) -> np.ndarray:
    """``W = I - gamma * (D - A)``; requires ``0 < gamma < 1/d_max``."""
    d = degrees(g)
    d_max = int(d.max()) if g.n else 0
    if gamma <= 0:
        raise ValueError(f"gamma must be positive, got {gamma}")
    if d_max > 0 and gamma >= 1.0 / d_max:
        raise ValueError(
            f"gamma={gamma} violates gamma < 1/d_max = {1.0 / d_max:.6g} (d_max={d_max})")
    L = np.diag(d.astype(float)) - g.adjacency()
    return np.eye(g.n) - gamma * L


@dataclass(frozen=True)
class WeightScheme:
    """A weight construction plus its parameters.

    For the Laplacian scheme ``gamma=None`` means ``gamma_factor / d_max`` of
    whichever graph the matrix is built on.
    """

    name: str = "metropolis"
    gamma: Optional[float] = None
    gamma_factor: float = DEFAULT_GAMMA_FACTOR

    def __post_init__(self):
        if self.name not in SCHEMES:
            raise ValueError(f"unknown weight scheme {self.name!r}; choose from {SCHEMES}")
        if not 0 < self.gamma_factor < 1:
            raise ValueError("gamma_factor must lie in (0, 1)")

    def gamma_for(self, g: Graph) -> float:
        if self.gamma is not None:
            return self.gamma
        d_max = int(degrees(g).max()) if g.n else 0
        return self.gamma_factor / max(d_max, 1)

    def build(self, g: Graph) -> np.ndarray:
        if self.name == "max-degree":
            return max_degree_weights(g)
        if self.name == "metropolis":
            return metropolis_weights(g)
        return laplacian_weights(g, self.gamma_for(g))

    def __str__(self):
        if self.name != "laplacian":
            return self.name
        if self.gamma is not None:
            return f"laplacian(gamma={self.gamma:g})"
        return f"laplacian(gamma={self.gamma_factor:g}/d_max)"


def expected_weight_matrix(model, scheme: WeightScheme, samples: int = 1000,
                           rng=None, current: Optional[Graph] = None,
                           fresh_mean: Optional[np.ndarray] = None) -> np.ndarray:
    """Expected weight matrix ``E[W]`` of a dynamic topology model.

    Closed forms are used where the scheme is linear in the realized edge set:

    * i.i.d. failures + Laplacian with fixed gamma: ``I - gamma (diag(P 1) - P)``
    * i.i.d. failures + maximum-degree: off-diagonal ``P / n``, diagonal
      ``1 - (P 1) / n``

    Every other combination is the mean of ``samples`` weight matrices built
    on independently sampled topologies.

    For :class:`MarkovSwitch` the expectation is of the next topology given
    ``current``: ``(1 - q) W(current) + q E[W(fresh graph)]``, the second term
    estimated by Monte Carlo. With ``current=None`` the stationary mean
    ``E[W(fresh graph)]`` is returned.
    """
    if isinstance(model, IidFailure):
        P = model.P
        n = model.base.n
        row = P.sum(axis=1)
        if scheme.name == "laplacian" and scheme.gamma is not None:
            gamma = scheme.gamma
            return np.eye(n) - gamma * (np.diag(row) - P)
        if scheme.name == "max-degree":
            W = P / n
            np.fill_diagonal(W, 1.0 - row / n)
            return W
        return _monte_carlo_mean(model, scheme, samples, rng, None)

    if isinstance(model, MarkovSwitch):
        if current is not None and model.q == 0.0:
            return scheme.build(current)
        fresh = fresh_mean if fresh_mean is not None else \
            _monte_carlo_mean(model, scheme, samples, rng, None)
        if current is None or model.q == 1.0:
            return np.array(fresh, dtype=float)
        return (1.0 - model.q) * scheme.build(current) + model.q * fresh

    raise TypeError(f"unknown dynamic model {type(model).__name__}")


def _monte_carlo_mean(model, scheme, samples, rng, current):
    if samples < 1:
        raise ValueError("samples must be >= 1")
    rng = _as_rng(rng)
    n = model.base.n if isinstance(model, IidFailure) else model.n
    acc = np.zeros((n, n))
    for _ in range(samples):
        g = model.fresh(rng) if isinstance(model, MarkovSwitch) else sample_topology(model, current, rng)
        acc += scheme.build(g)
    W = acc / samples
    # symmetric by construction; enforce bitwise
    return 0.5 * (W + W.T)


def check_weight_matrix(W: np.ndarray, g: Optional[Graph] = None, tol: float = 1e-10) -> list:
    """Return a list of violated weight-matrix invariants (empty if none)."""
    problems = []
    W = np.asarray(W, dtype=float)
    n = W.shape[0]
    if W.shape != (n, n):
        return ["not square"]
    if np.abs(W - W.T).max(initial=0.0) > tol:
        problems.append("not symmetric")
    if np.abs(W.sum(axis=1) - 1).max(initial=0.0) > tol:
        problems.append("row sums differ from 1")
    if np.abs(W.sum(axis=0) - 1).max(initial=0.0) > tol:
        problems.append("column sums differ from 1")
    if g is not None:
        mask = g.adjacency() + np.eye(n)
        if np.abs(W[mask == 0]).max(initial=0.0) > 0:
            problems.append("nonzero weight outside the edge set")
    return problems
