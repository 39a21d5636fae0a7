"""Small dense matrix kernels: symmetric eigenproblems, SPD powers, validation.

Every matrix that reaches the geometry and dynamics modules passes through
here first, so the tolerances below define what "symmetric" and "positive
definite" mean across the package.
"""

from __future__ import annotations

from typing import NamedTuple

import numpy as np

from .errors import NonSymmetric, NotPositiveDefinite

__all__ = [
    "Diagnostic",
    "frob",
    "sym_tol",
    "spd_floor",
    "symmetrize",
    "sym_eig",
    "spd_power",
    "spd_power_derivative",
    "validate",
]


class Diagnostic(NamedTuple):
    """Result of a membership test: flag plus the residual it was judged on."""

    passed: bool
    residual: float

    def __bool__(self) -> bool:
        return bool(self.passed)


def frob(M) -> float:
    M = np.asarray(M)
    return float(np.sqrt(np.vdot(M, M).real))


def sym_tol(S) -> float:
    return 1e-9 * max(1.0, frob(S))


def spd_floor(B) -> float:
    return 1e-12 * max(1.0, frob(B))


def symmetrize(S, name: str = "matrix") -> np.ndarray:
    """Return (S + S^T)/2, refusing inputs whose asymmetry exceeds ``sym_tol``.

    Integrators accumulate rounding asymmetry; projecting it away keeps
    flows on the symmetric subspace without hiding genuine errors.
    """
    S = np.asarray(S, dtype=float)
    if S.ndim != 2 or S.shape[0] != S.shape[1]:
        raise NonSymmetric(f"{name} must be square, got shape {S.shape}")
    res = frob(S - S.T)
    if res > sym_tol(S):
        raise NonSymmetric(f"{name} is not symmetric (||S - S^T||_F = {res:.3e})")
    return 0.5 * (S + S.T)


def sym_eig(S):
    """Eigendecomposition of a symmetric matrix, eigenvalues sorted descending.

    Returns
    -------
    eigenvalues : ndarray, shape (d,)
    eigenvectors : ndarray, shape (d, d)
        Orthogonal; column ``k`` pairs with ``eigenvalues[k]``.
    """
    S = symmetrize(S)
    w, V = np.linalg.eigh(S)
    order = np.argsort(w)[::-1]
    return w[order], V[:, order]


def spd_power(B, exponent: float) -> np.ndarray:
    """B**exponent for symmetric positive-definite B via eigendecomposition."""
    B = symmetrize(B, "B")
    w, V = np.linalg.eigh(B)
    if w[0] <= spd_floor(B):
        raise NotPositiveDefinite(
            f"matrix is not positive definite (min eigenvalue {w[0]:.3e})")
    R = (V * w**exponent) @ V.T
    return 0.5 * (R + R.T)


def spd_power_derivative(B, exponent: float, E) -> np.ndarray:
    """Frechet derivative of B -> B**exponent in the symmetric direction E.

    Daleckii-Krein: V (F * (V^T E V)) V^T with divided differences
    F_ij = (f(l_i) - f(l_j)) / (l_i - l_j), and f'(l_i) on the diagonal.
    """
    B = symmetrize(B, "B")
    E = symmetrize(E, "E")
    w, V = np.linalg.eigh(B)
    if w[0] <= spd_floor(B):
        raise NotPositiveDefinite(
            f"matrix is not positive definite (min eigenvalue {w[0]:.3e})")
    f = w**exponent
    dw = w[:, None] - w[None, :]
    close = np.abs(dw) <= 1e-8 * np.abs(w)[:, None]
    with np.errstate(divide="ignore", invalid="ignore"):
        F = np.where(close, 0.0, (f[:, None] - f[None, :]) / np.where(close, 1.0, dw))
    mean = 0.5 * (w[:, None] + w[None, :])
    F = np.where(close, exponent * mean ** (exponent - 1.0), F)
    R = V @ (F * (V.T @ E @ V)) @ V.T
    return 0.5 * (R + R.T)


def validate(S, kind: str, tol: float | None = None) -> Diagnostic:
    """Check membership of ``S`` in a matrix class without raising.

    ``kind`` is one of ``symmetric``, ``spd``, ``orthogonal`` or ``skew``.
    The residual is ||S - S^T||_F, the minimum eigenvalue of the symmetric
    part, ||S^T S - I||_F or ||S + S^T||_F respectively.  For ``spd`` the
    flag also requires symmetry.
    """
    S = np.asarray(S, dtype=float)
    if kind == "symmetric":
        res = frob(S - S.T)
        return Diagnostic(res <= (sym_tol(S) if tol is None else tol), res)
    if kind == "skew":
        res = frob(S + S.T)
        return Diagnostic(res <= (sym_tol(S) if tol is None else tol), res)
    if kind == "orthogonal":
        res = frob(S.T @ S - np.eye(S.shape[1]))
        return Diagnostic(res <= (1e-10 if tol is None else tol), res)
    if kind == "spd":
        sym_ok = frob(S - S.T) <= sym_tol(S)
        lam = float(np.linalg.eigvalsh(0.5 * (S + S.T))[0])
        floor = spd_floor(S) if tol is None else tol
        return Diagnostic(bool(sym_ok and lam > floor), lam)
    raise ValueError(f"unknown kind {kind!r}")
