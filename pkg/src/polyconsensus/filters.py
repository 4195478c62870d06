"""Polynomial filters p(lambda) = sum_i alpha_i lambda^i applied to weight matrices."""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Sequence

import numpy as np

__all__ = [
    "PolynomialFilter",
    "hermite_divided_differences",
    "newton_to_monomial",
    "newton_filter",
    "eval_filter",
    "apply_to_spectrum",
    "filtered_factor",
    "matrix_apply",
    "matrix_polynomial",
    "identity_filter",
]


@dataclass(frozen=True, eq=False)
class PolynomialFilter:
    """Monomial coefficients ``coeffs[i]`` of ``lambda**i``, degree ``k = len(coeffs) - 1``."""

    coeffs: np.ndarray

    def __post_init__(self):
        c = np.array(self.coeffs, dtype=float).reshape(-1)
        if c.size == 0:
            raise ValueError("a filter needs at least one coefficient")
        if not np.all(np.isfinite(c)):
            raise ValueError("filter coefficients must be finite")
        c.setflags(write=False)
        object.__setattr__(self, "coeffs", c)

    @property
    def k(self) -> int:
        return len(self.coeffs) - 1

    def is_consensus_preserving(self, tol: float = 1e-10) -> bool:
        scale = max(1.0, float(np.abs(self.coeffs).sum()))
        return abs(self.coeffs.sum() - 1.0) <= tol * scale

    def __call__(self, lam):
        return eval_filter(self, lam)

    def __eq__(self, other):
        if not isinstance(other, PolynomialFilter):
            return NotImplemented
        return np.array_equal(self.coeffs, other.coeffs)

    __hash__ = None

    def __repr__(self):
        return f"PolynomialFilter(k={self.k}, coeffs={self.coeffs.tolist()})"


def identity_filter() -> PolynomialFilter:
    return PolynomialFilter([0.0, 1.0])


def hermite_divided_differences(nodes: Sequence[float], derivs: dict) -> np.ndarray:
    """Newton coefficients of the Hermite interpolant on (possibly repeated) nodes.

    ``nodes`` must list equal nodes consecutively. ``derivs[x]`` is the list
    ``[f(x), f'(x), f''(x), ...]``, long enough to cover the multiplicity of
    ``x``. Returns ``c`` with ``p(t) = sum_j c[j] prod_{i<j} (t - nodes[i])``.
    """
    z = np.asarray(nodes, dtype=float)
    m = len(z)
    table = np.zeros((m, m))
    for i in range(m):
        table[i, 0] = derivs[z[i]][0]
    for j in range(1, m):
        for i in range(m - j):
            if z[i + j] == z[i]:
                # confluent entry: f[x,...,x] (j+1 copies) = f^(j)(x) / j!
                table[i, j] = derivs[z[i]][j] / math.factorial(j)
            else:
                table[i, j] = (table[i + 1, j - 1] - table[i, j - 1]) / (z[i + j] - z[i])
    return table[0].copy()


def newton_to_monomial(newton_coeffs: Sequence[float], nodes: Sequence[float]) -> np.ndarray:
    """Expand a Newton-form polynomial into monomial coefficients (ascending)."""
    c = np.asarray(newton_coeffs, dtype=float)
    z = np.asarray(nodes, dtype=float)
    m = len(c)
    poly = np.array([c[-1]])
    for j in range(m - 2, -1, -1):
        # poly <- poly * (t - z[j]) + c[j]
        shifted = np.concatenate([[0.0], poly])
        shifted[:-1] -= z[j] * poly
        shifted[0] += c[j]
        poly = shifted
    return poly


def newton_filter(k: int, a: float = 0.0) -> PolynomialFilter:
    """Degree-k filter with a k-fold zero at ``a`` and ``p(1) = 1``.

    Built from a confluent divided-difference table on nodes ``a`` (k times)
    and ``1``; the unique such polynomial is ``((lambda - a) / (1 - a))**k``.
    """
    if k < 1:
        raise ValueError("newton_filter needs k >= 1")
    if a == 1.0:
        raise ValueError("left endpoint a = 1 collides with the node at 1")
    if a > 1.0:
        raise ValueError("left endpoint a must be below 1")
    nodes = [a] * k + [1.0]
    derivs = {float(a): [0.0] * k, 1.0: [1.0]}
    newton = hermite_divided_differences(nodes, derivs)
    return PolynomialFilter(newton_to_monomial(newton, nodes))


def eval_filter(f: PolynomialFilter, lam):
    """Horner evaluation; ``lam`` may be a scalar or an array."""
    lam = np.asarray(lam, dtype=float)
    out = np.zeros_like(lam)
    for c in f.coeffs[::-1]:
        out = out * lam + c
    return float(out) if out.ndim == 0 else out


def apply_to_spectrum(f: PolynomialFilter, eigenvalues) -> np.ndarray:
    """Filtered eigenvalues in the input order (no re-sorting)."""
    return np.asarray(eval_filter(f, np.asarray(eigenvalues, dtype=float)), dtype=float)


def filtered_factor(f: PolynomialFilter, eigenvalues, tol: float = 1e-10) -> float:
    """``max_{i >= 2} |p(lambda_i)|`` for a spectrum whose first entry is 1."""
    lam = np.asarray(eigenvalues, dtype=float)
    if len(lam) == 0 or abs(lam[0] - 1.0) > tol:
        raise ValueError("the first eigenvalue must be the consensus eigenvalue 1")
    if len(lam) == 1:
        return 0.0
    return float(np.abs(apply_to_spectrum(f, lam[1:])).max())


def matrix_apply(f: PolynomialFilter, W: np.ndarray, x: np.ndarray) -> np.ndarray:
    """``p(W) x`` by Horner's scheme with k matrix-vector products."""
    W = np.asarray(W, dtype=float)
    x = np.asarray(x, dtype=float)
    if W.shape[1] != x.shape[0]:
        raise ValueError(f"dimension mismatch: W is {W.shape}, x has {x.shape[0]} rows")
    y = f.coeffs[-1] * x
    for c in f.coeffs[-2::-1]:
        y = W @ y + c * x
    return y


def matrix_polynomial(f: PolynomialFilter, W: np.ndarray) -> np.ndarray:
    """Densely formed ``sum_i alpha_i W^i`` (reference path for checks)."""
    W = np.asarray(W, dtype=float)
    n = W.shape[0]
    out = np.zeros((n, n))
    power = np.eye(n)
    for c in f.coeffs:
        out += c * power
        power = power @ W
    return out
