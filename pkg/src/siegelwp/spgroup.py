"""The symplectic group Sp(2d, R) in block form and its quotient by U(d).

Matrices are plain ``(2d, 2d)`` ndarrays with blocks ``[[A, B], [C, D]]``.
The complex view identifies ``Q = A + iB`` and ``P = C + iD``.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache

import numpy as np

from . import siegel
from .errors import (ConstraintViolation, NotSymplectic, NotUnitary,
                     SingularDenominator)
from .matlin import Diagnostic, frob, spd_power, symmetrize

__all__ = [
    "SP_TOL",
    "standard_J",
    "blocks",
    "from_blocks",
    "UnitaryPair",
    "ComplexQP",
    "is_symplectic",
    "require_symplectic",
    "embed_unitary",
    "extract_unitary",
    "iwasawa",
    "project_to_siegel",
    "fiber_point",
    "to_complex",
    "from_complex",
]

SP_TOL = 1e-8


@lru_cache(maxsize=None)
def _standard_J(d: int) -> np.ndarray:
    I = np.eye(d)
    J = from_blocks(np.zeros((d, d)), I, -I, np.zeros((d, d)))
    J.flags.writeable = False
    return J


def standard_J(d: int) -> np.ndarray:
    return _standard_J(int(d)).copy()


def blocks(S):
    S = np.asarray(S)
    n = S.shape[0]
    if S.ndim != 2 or n != S.shape[1] or n % 2:
        raise ValueError(f"expected a (2d, 2d) matrix, got shape {S.shape}")
    d = n // 2
    return S[:d, :d], S[:d, d:], S[d:, :d], S[d:, d:]


def from_blocks(A, B, C, D) -> np.ndarray:
    A, B, C, D = (np.asarray(M) for M in (A, B, C, D))
    d = A.shape[0]
    out = np.empty((2 * d, 2 * d), dtype=np.result_type(A, B, C, D))
    out[:d, :d], out[:d, d:], out[d:, :d], out[d:, d:] = A, B, C, D
    return out


@dataclass(frozen=True)
class UnitaryPair:
    """Real and imaginary parts of a unitary matrix U + iV."""

    U: np.ndarray
    V: np.ndarray

    def __post_init__(self):
        U = np.asarray(self.U, dtype=float)
        V = np.asarray(self.V, dtype=float)
        object.__setattr__(self, "U", U)
        object.__setattr__(self, "V", V)
        if U.shape != V.shape or U.ndim != 2 or U.shape[0] != U.shape[1]:
            raise NotUnitary(f"U and V must be equal square shapes, got {U.shape}, {V.shape}")
        res = self.residual()
        if res > SP_TOL:
            raise NotUnitary(f"U + iV is not unitary (residual {res:.3e})")

    @property
    def d(self) -> int:
        return self.U.shape[0]

    def residual(self) -> float:
        U, V = self.U, self.V
        return frob(U.T @ U + V.T @ V - np.eye(self.d)) + frob(U.T @ V - V.T @ U)

    @classmethod
    def from_complex(cls, W) -> "UnitaryPair":
        W = np.asarray(W, dtype=complex)
        return cls(W.real.copy(), W.imag.copy())

    def as_complex(self) -> np.ndarray:
        return self.U + 1j * self.V


@dataclass(frozen=True)
class ComplexQP:
    """Hagedorn's pair of complex d x d matrices.

    Not validated on construction; use :meth:`residuals` / :meth:`require_on_shell`.
    """

    Q: np.ndarray
    P: np.ndarray

    def __post_init__(self):
        object.__setattr__(self, "Q", np.asarray(self.Q, dtype=complex))
        object.__setattr__(self, "P", np.asarray(self.P, dtype=complex))

    @property
    def d(self) -> int:
        return self.Q.shape[0]

    def residuals(self):
        """(||Q^T P - P^T Q||_F, ||Q^* P - P^* Q - 2i I||_F)."""
        Q, P = self.Q, self.P
        r1 = frob(Q.T @ P - P.T @ Q)
        r2 = frob(Q.conj().T @ P - P.conj().T @ Q - 2j * np.eye(self.d))
        return r1, r2

    def onshell_residual(self) -> float:
        return float(np.hypot(*self.residuals()))

    def is_on_shell(self, tol: float = SP_TOL) -> Diagnostic:
        res = self.onshell_residual()
        return Diagnostic(res <= tol, res)

    def require_on_shell(self, tol: float = SP_TOL) -> "ComplexQP":
        diag = self.is_on_shell(tol)
        if not diag:
            raise ConstraintViolation(f"(Q, P) is off-shell (residual {diag.residual:.3e})")
        return self


def is_symplectic(S, tol: float = SP_TOL) -> Diagnostic:
    """Residual ||S^T J S - J||_F and whether it is within ``tol``."""
    S = np.asarray(S, dtype=float)
    if S.ndim != 2 or S.shape[0] != S.shape[1] or S.shape[0] % 2:
        return Diagnostic(False, float("inf"))
    J = standard_J(S.shape[0] // 2)
    res = frob(S.T @ J @ S - J)
    return Diagnostic(res <= tol, res)


def require_symplectic(S, tol: float = SP_TOL) -> np.ndarray:
    diag = is_symplectic(S, tol)
    if not diag:
        raise NotSymplectic(f"matrix is not symplectic (||S^T J S - J||_F = {diag.residual:.3e})")
    return np.asarray(S, dtype=float)


def embed_unitary(pair: UnitaryPair) -> np.ndarray:
    """U + iV  ->  [[U, V], [-V, U]], an element of Sp(2d) intersected with O(2d)."""
    return from_blocks(pair.U, pair.V, -pair.V, pair.U)


def extract_unitary(S, tol: float = SP_TOL) -> UnitaryPair:
    """Inverse of :func:`embed_unitary`; checks the [[U, V], [-V, U]] pattern first."""
    A, B, C, D = blocks(np.asarray(S, dtype=float))
    pattern = frob(A - D) + frob(B + C)
    if pattern > tol:
        raise NotUnitary(f"matrix lacks the [[U, V], [-V, U]] pattern (residual {pattern:.3e})")
    return UnitaryPair(A.copy(), B.copy())


def iwasawa(S):
    """Factor S = [[L, 0], [P L, L^-1]] @ embed_unitary(u).

    Returns
    -------
    P : symmetric (d, d)
    L : SPD (d, d)
    u : UnitaryPair
    """
    A, B, C, D = blocks(require_symplectic(S))
    G = A @ A.T + B @ B.T
    Ginv_half = spd_power(G, -0.5)
    P = symmetrize((C @ A.T + D @ B.T) @ np.linalg.inv(G), "P")
    L = spd_power(G, 0.5)
    W = Ginv_half @ (A + 1j * B)
    return P, L, UnitaryPair(W.real, W.imag)


def project_to_siegel(S) -> "siegel.SiegelPoint":
    """Quotient map Sp(2d, R) -> Sigma_d,  S |-> (C + iD)(A + iB)^-1."""
    A, B, C, D = blocks(require_symplectic(S))
    return _fraction(C + 1j * D, A + 1j * B)


def _fraction(num, den) -> "siegel.SiegelPoint":
    """num @ den^-1 packaged as a Siegel point, with the conditioning guard."""
    if np.linalg.cond(den) > siegel.COND_LIMIT:
        raise SingularDenominator("denominator is numerically singular")
    Z = np.linalg.solve(den.T, num.T).T
    return siegel.SiegelPoint.from_complex(0.5 * (Z + Z.T))


def fiber_point(X: "siegel.SiegelPoint", u: UnitaryPair) -> np.ndarray:
    """The element section(X) @ embed_unitary(u) of the fiber over X."""
    return siegel.section(X) @ embed_unitary(u)


def to_complex(S) -> ComplexQP:
    A, B, C, D = blocks(require_symplectic(S))
    return ComplexQP(A + 1j * B, C + 1j * D)


def from_complex(qp: ComplexQP, tol: float = SP_TOL) -> np.ndarray:
    qp.require_on_shell(tol)
    return from_blocks(qp.Q.real, qp.Q.imag, qp.P.real, qp.P.imag)
