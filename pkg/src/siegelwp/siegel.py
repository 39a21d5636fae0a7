"""The Siegel upper half space Sigma_d = {A + iB : A = A^T, B = B^T > 0}.

Points are stored as the real pair (A, B); the complex matrix A + iB is a
conversion.  Sp(2d, R) acts by (C + D X)(A + B X)^-1.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import spgroup
from .errors import NotPositiveDefinite, SingularDenominator
from .matlin import spd_floor, spd_power, symmetrize

__all__ = [
    "COND_LIMIT",
    "SiegelPoint",
    "SiegelTangent",
    "mobius_act",
    "section",
    "siegel_form",
    "siegel_metric",
    "riccati_rhs",
]

COND_LIMIT = 1e12


@dataclass(frozen=True)
class SiegelPoint:
    A: np.ndarray
    B: np.ndarray

    def __post_init__(self):
        A = symmetrize(self.A, "A")
        B = symmetrize(self.B, "B")
        if A.shape != B.shape:
            raise ValueError(f"A and B shapes differ: {A.shape} vs {B.shape}")
        lam = np.linalg.eigvalsh(B)[0]
        if lam <= spd_floor(B):
            raise NotPositiveDefinite(f"B is not positive definite (min eigenvalue {lam:.3e})")
        object.__setattr__(self, "A", A)
        object.__setattr__(self, "B", B)

    @property
    def d(self) -> int:
        return self.A.shape[0]

    @property
    def C(self) -> np.ndarray:
        return self.A + 1j * self.B

    @classmethod
    def from_complex(cls, C) -> "SiegelPoint":
        C = np.atleast_2d(np.asarray(C, dtype=complex))
        return cls(C.real.copy(), C.imag.copy())

    @classmethod
    def trusted(cls, A, B) -> "SiegelPoint":
        """Build from blocks known to be symmetric up to rounding (integrator stages).

        Skips the asymmetry check but still symmetrizes and still tests B > 0.
        """
        A = 0.5 * (A + A.T)
        B = 0.5 * (B + B.T)
        try:
            np.linalg.cholesky(B)
        except np.linalg.LinAlgError:
            raise NotPositiveDefinite("B is not positive definite") from None
        obj = object.__new__(cls)
        object.__setattr__(obj, "A", A)
        object.__setattr__(obj, "B", B)
        return obj

    @classmethod
    def base(cls, d: int) -> "SiegelPoint":
        """The point iI_d."""
        return cls(np.zeros((d, d)), np.eye(d))


@dataclass(frozen=True)
class SiegelTangent:
    dA: np.ndarray
    dB: np.ndarray

    def __post_init__(self):
        object.__setattr__(self, "dA", symmetrize(np.atleast_2d(self.dA), "dA"))
        object.__setattr__(self, "dB", symmetrize(np.atleast_2d(self.dB), "dB"))

    @property
    def dC(self) -> np.ndarray:
        return self.dA + 1j * self.dB


def mobius_act(S, X: SiegelPoint) -> SiegelPoint:
    """Generalized linear fractional action of S = [[A, B], [C, D]] on X."""
    A, B, C, D = spgroup.blocks(spgroup.require_symplectic(S))
    Xc = X.C
    den = A + B @ Xc
    if np.linalg.cond(den) > COND_LIMIT:
        raise SingularDenominator("A + B X is numerically singular")
    Z = np.linalg.solve(den.T, (C + D @ Xc).T).T
    return SiegelPoint.from_complex(0.5 * (Z + Z.T))


def section(X: SiegelPoint) -> np.ndarray:
    """Symplectic matrix [[B^-1/2, 0], [A B^-1/2, B^1/2]] mapping iI to X."""
    Bmh = spd_power(X.B, -0.5)
    Bh = spd_power(X.B, 0.5)
    return spgroup.from_blocks(Bmh, np.zeros_like(Bmh), X.A @ Bmh, Bh)


def _binv_variation(Binv, dB):
    return -Binv @ dB @ Binv


def siegel_form(X: SiegelPoint, u: SiegelTangent, v: SiegelTangent) -> float:
    """Omega_Sigma = -d(B^-1)_jk ^ dA_jk, evaluated without a 1/2 factor."""
    Binv = spd_power(X.B, -1.0)
    du = _binv_variation(Binv, u.dB)
    dv = _binv_variation(Binv, v.dB)
    return -(float(np.sum(du * v.dA)) - float(np.sum(dv * u.dA)))


def siegel_metric(X: SiegelPoint, u: SiegelTangent, v: SiegelTangent) -> complex:
    """Hermitian metric tr(B^-1 dC_u B^-1 conj(dC_v))."""
    Binv = spd_power(X.B, -1.0)
    return complex(np.trace(Binv @ u.dC @ Binv @ v.dC.conj()))


def riccati_rhs(C, hessV, m: float) -> np.ndarray:
    """Right-hand side -C^2/m - hess V of the matrix Riccati flow."""
    C = np.atleast_2d(np.asarray(C, dtype=complex))
    R = -(C @ C) / m - np.atleast_2d(hessV)
    return 0.5 * (R + R.T)
