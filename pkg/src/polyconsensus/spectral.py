"""Symmetric eigendecomposition and consensus convergence factors."""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

__all__ = [
    "TOLERANCES",
    "SpectralDecomposition",
    "ConvergenceReport",
    "NonSymmetricError",
    "SpectralError",
    "jacobi_eigh",
    "eig_sym",
    "deflated_radius",
    "deflated_radius_direct",
    "deflated_eigenvalues",
    "check_convergence",
]

# Central tolerance table; callers may pass overrides to the functions below.
TOLERANCES = {
    "symmetry": 1e-12,
    "jacobi_off": 1e-12,
    "jacobi_max_sweeps": 100,
    "stochastic": 1e-10,
    "unit_eigenvalue": 1e-8,
    "consensus_overlap": 1e-8,
}


class NonSymmetricError(ValueError):
    pass


class SpectralError(ValueError):
    pass


@dataclass(frozen=True, eq=False)
class SpectralDecomposition:
    """``W = Q diag(eigenvalues) Q^T`` with eigenvalues sorted descending."""

    eigenvalues: np.ndarray
    eigenvectors: np.ndarray

    def reconstruct(self) -> np.ndarray:
        Q = self.eigenvectors
        return (Q * self.eigenvalues) @ Q.T


@dataclass(frozen=True)
class ConvergenceReport:
    row_stochastic: bool
    column_stochastic: bool
    deflated_radius: float

    @property
    def converges(self) -> bool:
        return (self.row_stochastic and self.column_stochastic
                and self.deflated_radius < 1.0 - TOLERANCES["stochastic"])


def _round_robin(m: int):
    """Yield the m-1 rounds of disjoint pairs covering all pairs of range(m), m even."""
    players = list(range(m))
    for _ in range(m - 1):
        yield [(players[i], players[m - 1 - i]) for i in range(m // 2)]
        players = [players[0], players[-1]] + players[1:-1]


def jacobi_eigh(A: np.ndarray, tol: float = None, max_sweeps: int = None):
    """Cyclic Jacobi eigensolver for a dense symmetric matrix.

    Each sweep visits every off-diagonal pair once, grouped into rounds of
    disjoint pairs so that a round is applied as one vectorized orthogonal
    similarity. Iterates until the off-diagonal Frobenius norm is at most
    ``tol * max(1, ||A||_F)``.

    Returns ``(eigenvalues, eigenvectors)`` unsorted.
    """
    tol = TOLERANCES["jacobi_off"] if tol is None else tol
    max_sweeps = TOLERANCES["jacobi_max_sweeps"] if max_sweeps is None else max_sweeps
    A = np.array(A, dtype=float)
    n = A.shape[0]
    V = np.eye(n)
    if n <= 1:
        return np.diag(A).copy(), V
    # pad to even size with an isolated dummy index
    m = n + (n % 2)
    if m != n:
        A = np.pad(A, ((0, 1), (0, 1)))
        V = np.pad(V, ((0, 1), (0, 1)))
        V[n, n] = 1.0
    rounds = []
    for pairs in _round_robin(m):
        p = np.array([min(a, b) for a, b in pairs])
        q = np.array([max(a, b) for a, b in pairs])
        rounds.append((p, q))
    scale = max(1.0, np.linalg.norm(A))

    def off(M):
        return np.linalg.norm(M - np.diag(np.diag(M)))

    for _ in range(max_sweeps):
        if off(A) <= tol * scale:
            break
        for p, q in rounds:
            apq = A[p, q]
            app = A[p, p]
            aqq = A[q, q]
            # skip pairs already negligible relative to their diagonal gap
            active = np.abs(apq) > 1e-18 * (np.abs(app) + np.abs(aqq) + 1e-300)
            theta = np.where(active, (aqq - app) / (2.0 * np.where(active, apq, 1.0)), 0.0)
            t = np.where(active,
                         np.sign(theta) / (np.abs(theta) + np.hypot(theta, 1.0)),
                         0.0)
            t = np.where(active & (theta == 0.0), 1.0, t)
            c = 1.0 / np.sqrt(t * t + 1.0)
            s = t * c
            Ap, Aq = A[:, p].copy(), A[:, q].copy()
            A[:, p] = c * Ap - s * Aq
            A[:, q] = s * Ap + c * Aq
            Ap, Aq = A[p, :].copy(), A[q, :].copy()
            A[p, :] = c[:, None] * Ap - s[:, None] * Aq
            A[q, :] = s[:, None] * Ap + c[:, None] * Aq
            A[p, q] = 0.0
            A[q, p] = 0.0
            Vp, Vq = V[:, p].copy(), V[:, q].copy()
            V[:, p] = c * Vp - s * Vq
            V[:, q] = s * Vp + c * Vq
    else:
        if off(A) > tol * scale:
            raise SpectralError(
                f"Jacobi did not converge in {max_sweeps} sweeps (off-diagonal norm {off(A):.3e})")
    return np.diag(A)[:n].copy(), V[:n, :n].copy()


def _check_symmetric(W, tol):
    W = np.asarray(W, dtype=float)
    if W.ndim != 2 or W.shape[0] != W.shape[1]:
        raise NonSymmetricError(f"expected a square matrix, got shape {W.shape}")
    asym = np.abs(W - W.T).max(initial=0.0)
    if asym > tol:
        raise NonSymmetricError(f"matrix is not symmetric (max |W - W^T| = {asym:.3e})")
    return W


def eig_sym(W, method: str = "jacobi", symmetry_tol: float = None) -> SpectralDecomposition:
    """Eigendecomposition of a symmetric matrix, eigenvalues sorted descending.

    ``method="jacobi"`` (default) uses :func:`jacobi_eigh`; ``method="lapack"``
    delegates to ``numpy.linalg.eigh``.
    """
    tol = TOLERANCES["symmetry"] if symmetry_tol is None else symmetry_tol
    W = _check_symmetric(W, tol)
    W = 0.5 * (W + W.T)
    if method == "jacobi":
        vals, vecs = jacobi_eigh(W)
    elif method == "lapack":
        vals, vecs = np.linalg.eigh(W)
    else:
        raise ValueError(f"unknown eigensolver {method!r}")
    order = np.argsort(-vals, kind="stable")
    return SpectralDecomposition(vals[order], vecs[:, order])


def _consensus_index(dec: SpectralDecomposition) -> int:
    """Index of the eigenpair (1, 1/sqrt(n)).

    The eigenvector with the largest overlap with 1/sqrt(n) is chosen. When the
    eigenvalue 1 is repeated, the overlap is spread over that eigenspace, so the
    check is on the total overlap of the unit cluster instead of a single
    vector.
    """
    vals, Q = dec.eigenvalues, dec.eigenvectors
    n = len(vals)
    u = np.full(n, 1.0 / np.sqrt(n))
    overlap = np.abs(Q.T @ u)
    unit = np.abs(vals - 1.0) <= TOLERANCES["unit_eigenvalue"]
    if not unit.any():
        raise SpectralError("no eigenvalue equals 1; W 1 = 1 does not hold")
    mass = np.sum(overlap[unit] ** 2)
    if mass < 1.0 - TOLERANCES["consensus_overlap"]:
        raise SpectralError(
            f"1/sqrt(n) is not an eigenvector for eigenvalue 1 (overlap mass {mass:.3e})")
    best = int(np.argmax(overlap))
    rivals = np.abs(overlap - overlap[best]) <= TOLERANCES["consensus_overlap"]
    rivals[best] = False
    if np.any(rivals & ~unit):
        raise SpectralError("ambiguous consensus eigenvector (tie across distinct eigenvalues)")
    if not unit[best]:
        raise SpectralError("best consensus overlap is not at eigenvalue 1")
    return best


def deflated_eigenvalues(W, method: str = "jacobi") -> np.ndarray:
    """Eigenvalues of W with one copy of the consensus eigenvalue 1 removed (descending)."""
    W = np.asarray(W, dtype=float)
    if np.abs(W.sum(axis=1) - 1.0).max(initial=0.0) > TOLERANCES["stochastic"]:
        raise SpectralError("deflation requires W 1 = 1")
    dec = eig_sym(W, method)
    idx = _consensus_index(dec)
    return np.delete(dec.eigenvalues, idx)


def deflated_radius(W, method: str = "jacobi") -> float:
    """Spectral radius of ``W - 1 1^T / n`` from the eigenvalues of W."""
    rest = deflated_eigenvalues(W, method)
    return float(np.abs(rest).max()) if len(rest) else 0.0


def deflated_radius_direct(W, method: str = "jacobi") -> float:
    """Spectral radius of the explicitly formed ``W - 1 1^T / n``."""
    W = np.asarray(W, dtype=float)
    n = W.shape[0]
    dec = eig_sym(W - np.full((n, n), 1.0 / n), method)
    return float(np.abs(dec.eigenvalues).max())


def check_convergence(W, tol: float = None) -> ConvergenceReport:
    """Evaluate the three conditions for ``W^t -> 1 1^T / n``."""
    tol = TOLERANCES["stochastic"] if tol is None else tol
    W = np.asarray(W, dtype=float)
    n = W.shape[0]
    row = bool(np.abs(W.sum(axis=1) - 1.0).max(initial=0.0) <= tol)
    col = bool(np.abs(W.sum(axis=0) - 1.0).max(initial=0.0) <= tol)
    D = W - np.full((n, n), 1.0 / n)
    if np.abs(W - W.T).max(initial=0.0) <= TOLERANCES["symmetry"]:
        rho = float(np.abs(eig_sym(D).eigenvalues).max())
    else:
        rho = float(np.abs(np.linalg.eigvals(D)).max())
    return ConvergenceReport(row, col, rho)
