"""Optimal polynomial filters.

Minimizing ``rho(sum_i alpha_i W^i - 1 1^T / n)`` subject to ``p(1) = 1`` is a
semidefinite program in general, but every matrix involved is a polynomial in
the symmetric W and so shares W's eigenbasis, with 1/sqrt(n) the eigenvector of
eigenvalue 1. The matrix inequality ``-sI <= p(W) - 1 1^T/n <= sI`` therefore
splits into the scalar constraints ``|p(lambda_i)| <= s`` over the deflated
eigenvalues, and the program becomes the linear minimax problem

    min s   s.t.   -s <= p(lambda_i) <= s  (i >= 2),   p(1) = 1,

solved here with a dual simplex LP in a shifted Chebyshev basis.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from numpy.polynomial import Chebyshev, Polynomial
from scipy.optimize import linprog

from .filters import PolynomialFilter, apply_to_spectrum
from .spectral import check_convergence, deflated_eigenvalues
from .weights import WeightScheme, expected_weight_matrix

__all__ = [
    "MinimaxSolution",
    "OptimizationError",
    "MAX_DEGREE",
    "DEDUP_TOL",
    "lp_minimax",
    "optimal_filter_static",
    "optimal_filter_dynamic",
]

MAX_DEGREE = 12
DEDUP_TOL = 1e-9


class OptimizationError(RuntimeError):
    pass


@dataclass(frozen=True, eq=False)
class MinimaxSolution:
    filter: PolynomialFilter
    s_star: float
    active_set: tuple
    eigenvalues: np.ndarray

    @property
    def coeffs(self) -> np.ndarray:
        return self.filter.coeffs


def _dedup(lam: np.ndarray, tol: float) -> np.ndarray:
    lam = np.sort(lam)
    keep = [lam[0]]
    for v in lam[1:]:
        if v - keep[-1] > tol:
            keep.append(v)
    return np.array(keep)


def _basis(lo: float, hi: float, k: int):
    if hi - lo < 1e-12:
        lo, hi = lo - 0.5, hi + 0.5
    mid, half = 0.5 * (hi + lo), 0.5 * (hi - lo)

    def rows(x):
        return np.polynomial.chebyshev.chebvander((np.asarray(x, dtype=float) - mid) / half, k)

    def to_monomial(c):
        poly = Chebyshev(c, domain=[lo, hi]).convert(kind=Polynomial)
        out = np.zeros(k + 1)
        out[: len(poly.coef)] = poly.coef
        return out

    return rows, to_monomial


def _polish(T, t1, c, s, tol=1e-7):
    """Re-solve the LP vertex from its active constraints for full precision."""
    v = T @ c
    active = np.nonzero(np.abs(v) >= s - tol * max(1.0, s))[0]
    if len(active) == 0:
        return c, s
    sign = np.sign(v[active])
    A = np.zeros((len(active) + 1, T.shape[1] + 1))
    A[:-1, :-1] = T[active]
    A[:-1, -1] = -sign
    A[-1, :-1] = t1
    b = np.zeros(len(active) + 1)
    b[-1] = 1.0
    sol, *_ = np.linalg.lstsq(A, b, rcond=None)
    c2, s2 = sol[:-1], sol[-1]
    resid = np.abs(A @ sol - b).max()
    achieved = np.abs(T @ c2).max()
    if resid < 1e-10 and achieved <= s + 1e-12 and abs(achieved - abs(s2)) < 1e-9:
        return c2, achieved
    return c, s


def lp_minimax(deflated, k: int) -> MinimaxSolution:
    """Minimax filter of degree k over the given deflated eigenvalues.

    Solves ``min s`` subject to ``|p(lambda_i)| <= s`` for every distinct
    eigenvalue (2m inequality rows plus ``s >= 0``) and ``p(1) = 1``. When
    the optimum is not unique (only possible when the filter can interpolate
    zero at every eigenvalue), the minimum-norm monomial coefficient vector
    is returned.
    """
    lam_all = np.asarray(deflated, dtype=float).reshape(-1)
    if k < 0:
        raise ValueError("degree must be non-negative")
    if k > MAX_DEGREE:
        raise ValueError(f"degree {k} exceeds {MAX_DEGREE}: monomial conversion is unreliable")
    if lam_all.size == 0:
        raise ValueError("no deflated eigenvalues")
    if np.abs(lam_all).max() > 1 + 1e-9:
        raise ValueError("deflated eigenvalues must lie in [-1, 1]")
    lam = _dedup(lam_all, DEDUP_TOL)
    m = len(lam)

    if k == 0:
        coeffs = np.array([1.0])
    elif m <= k:
        # interpolate 0 at every eigenvalue and 1 at 1; min-norm among solutions
        A = np.vander(np.append(lam, 1.0), k + 1, increasing=True)
        b = np.zeros(m + 1)
        b[-1] = 1.0
        coeffs, *_ = np.linalg.lstsq(A, b, rcond=None)
    else:
        rows, to_monomial = _basis(lam[0], lam[-1], k)
        T = rows(lam)
        t1 = rows([1.0])[0]
        nv = k + 2
        cost = np.zeros(nv)
        cost[-1] = 1.0
        A_ub = np.block([[T, -np.ones((m, 1))], [-T, -np.ones((m, 1))]])
        b_ub = np.zeros(2 * m)
        A_eq = np.append(t1, 0.0)[None, :]
        bounds = [(None, None)] * (k + 1) + [(0, None)]
        res = linprog(cost, A_ub=A_ub, b_ub=b_ub, A_eq=A_eq, b_eq=[1.0], bounds=bounds,
                      method="highs-ds",
                      options={"primal_feasibility_tolerance": 1e-10,
                               "dual_feasibility_tolerance": 1e-10})
        if res.status != 0:
            eq_res = float(abs(A_eq @ res.x - 1.0)[0]) if res.x is not None else float("nan")
            raise OptimizationError(
                f"LP solver failed ({res.message}); equality residual {eq_res:.3e}")
        c, s = res.x[:-1], res.x[-1]
        c, s = _polish(T, t1, c, s)
        coeffs = to_monomial(c)

    total = coeffs.sum()
    if not np.isfinite(total) or abs(total) < 1e-300:
        raise OptimizationError("degenerate filter: coefficients do not sum to a usable value")
    coeffs = coeffs / total
    f = PolynomialFilter(coeffs)
    vals = np.abs(apply_to_spectrum(f, lam_all))
    s_star = float(vals.max())
    band = max(1e-9, 1e-7 * s_star)
    active = tuple(int(i) for i in np.nonzero(vals >= s_star - band)[0]) if s_star > 1e-12 else ()
    return MinimaxSolution(f, s_star, active, lam_all)


def optimal_filter_static(W, k: int, method: str = "jacobi") -> MinimaxSolution:
    """Filter of degree k minimizing the deflated spectral radius of ``p(W)``."""
    report = check_convergence(W)
    if not report.converges:
        raise ValueError(f"weight matrix does not satisfy the convergence conditions: {report}")
    return lp_minimax(deflated_eigenvalues(W, method), k)


def optimal_filter_dynamic(model, scheme: WeightScheme, k: int, samples: int = 1000,
                           rng=None, current=None, method: str = "jacobi") -> MinimaxSolution:
    """Static design on the expected weight matrix of a dynamic model."""
    W_bar = expected_weight_matrix(model, scheme, samples, rng=rng, current=current)
    return optimal_filter_static(W_bar, k, method)
