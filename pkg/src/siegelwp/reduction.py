"""Phase space Z_d = T*R^(2d^2) = M_2d(R) with its O(2d) symmetry.

A phase point Z = [[Q1, Q2], [P1, P2]] is a plain (2d, 2d) array.  The
momentum map of right multiplication by O(2d) has level set Sp(2d, R) at
the value J, and the quotient of that level set by U(d) is Sigma_d with
reduced form -1/2 Omega_Sigma.  :func:`reduced_form_check` evaluates both
sides of that last statement on concrete tangent vectors.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import NotOnLevelSet, NotOrthogonal, NotSkew, TangencyViolation
from .matlin import Diagnostic, frob, spd_power, spd_power_derivative
from .siegel import SiegelPoint, SiegelTangent, siegel_form
from .spgroup import SP_TOL, blocks, from_blocks, standard_J

__all__ = [
    "MomentumValue",
    "theta_eval",
    "omega_eval",
    "o2d_act",
    "momentum_map",
    "momentum_differential",
    "lie_pairing",
    "is_on_level_J",
    "pairing_identity_check",
    "projection",
    "projection_differential",
    "projection_differential_fd",
    "level_tangent",
    "horizontal_lift",
    "reduced_form_check",
]

TANGENCY_TOL = 1e-8


@dataclass(frozen=True)
class MomentumValue:
    M11: np.ndarray
    M12: np.ndarray
    M22: np.ndarray

    def assemble(self) -> np.ndarray:
        return from_blocks(self.M11, self.M12, -self.M12.T, self.M22)


def theta_eval(Z, v) -> float:
    """Canonical one-form tr(P1^T dQ1) + tr(P2^T dQ2) at Z on v."""
    _, _, P1, P2 = blocks(Z)
    dQ1, dQ2, _, _ = blocks(v)
    return float(np.sum(P1 * dQ1) + np.sum(P2 * dQ2))


def omega_eval(Z, v, w) -> float:
    """Standard form dQ1^dP1 + dQ2^dP2 (independent of the base point Z)."""
    vQ1, vQ2, vP1, vP2 = blocks(v)
    wQ1, wQ2, wP1, wP2 = blocks(w)
    return float(np.sum(vQ1 * wP1) - np.sum(wQ1 * vP1)
                 + np.sum(vQ2 * wP2) - np.sum(wQ2 * vP2))


def o2d_act(Z, R, tol=1e-10):
    R = np.asarray(R, dtype=float)
    res = frob(R.T @ R - np.eye(R.shape[0]))
    if res > tol:
        raise NotOrthogonal(f"R is not orthogonal (||R^T R - I||_F = {res:.3e})")
    return np.asarray(Z) @ R


def momentum_map(Z) -> MomentumValue:
    Q1, Q2, P1, P2 = blocks(Z)
    M11 = Q1.T @ P1
    M22 = Q2.T @ P2
    return MomentumValue(M11 - M11.T, Q1.T @ P2 - P1.T @ Q2, M22 - M22.T)


def momentum_differential(Z, v) -> np.ndarray:
    """Directional derivative dM(Z)[v], assembled as a 2d x 2d matrix."""
    Q1, Q2, P1, P2 = blocks(Z)
    dQ1, dQ2, dP1, dP2 = blocks(v)
    d11 = dQ1.T @ P1 + Q1.T @ dP1
    d22 = dQ2.T @ P2 + Q2.T @ dP2
    d12 = dQ1.T @ P2 + Q1.T @ dP2 - dP1.T @ Q2 - P1.T @ dQ2
    return from_blocks(d11 - d11.T, d12, -d12.T, d22 - d22.T)


def lie_pairing(xi, eta) -> float:
    """<xi, eta> = tr(xi^T eta) / 2 on o(2d)."""
    xi = np.asarray(xi, dtype=float)
    eta = np.asarray(eta, dtype=float)
    for name, M in (("xi", xi), ("eta", eta)):
        if frob(M + M.T) > 1e-9 * max(1.0, frob(M)):
            raise NotSkew(f"{name} is not skew-symmetric")
    return 0.5 * float(np.sum(xi * eta))


def is_on_level_J(Z, tol: float = SP_TOL) -> Diagnostic:
    Z = np.asarray(Z, dtype=float)
    res = frob(momentum_map(Z).assemble() - standard_J(Z.shape[0] // 2))
    return Diagnostic(res <= tol, res)


def pairing_identity_check(Z, xi):
    """Both sides of <M(Z), xi> = Theta(Z xi)."""
    Z = np.asarray(Z, dtype=float)
    lhs = lie_pairing(momentum_map(Z).assemble(), xi)
    rhs = theta_eval(Z, Z @ xi)
    return lhs, rhs


def projection(Z) -> SiegelPoint:
    """pi(Z) = P Q^-1 with Q = Q1 + iQ2, P = P1 + iP2."""
    Q1, Q2, P1, P2 = blocks(Z)
    Q = Q1 + 1j * Q2
    P = P1 + 1j * P2
    X = np.linalg.solve(Q.T, P.T).T
    return SiegelPoint.from_complex(0.5 * (X + X.T))


def projection_differential(Z, v) -> SiegelTangent:
    """T pi(Z) v from d(P Q^-1) = dP Q^-1 - P Q^-1 dQ Q^-1."""
    Q1, Q2, P1, P2 = blocks(Z)
    dQ1, dQ2, dP1, dP2 = blocks(v)
    Qinv = np.linalg.inv(Q1 + 1j * Q2)
    X = (P1 + 1j * P2) @ Qinv
    dX = ((dP1 + 1j * dP2) - X @ (dQ1 + 1j * dQ2)) @ Qinv
    dX = 0.5 * (dX + dX.T)
    return SiegelTangent(dX.real, dX.imag)


def projection_differential_fd(Z, v, h=1e-6) -> SiegelTangent:
    """Central finite-difference estimate of T pi(Z) v."""
    Xp = projection(np.asarray(Z) + h * np.asarray(v))
    Xm = projection(np.asarray(Z) - h * np.asarray(v))
    return SiegelTangent((Xp.A - Xm.A) / (2 * h), (Xp.B - Xm.B) / (2 * h))


def level_tangent(Z, xi):
    """Right translate Z xi; tangent to Sp(2d) at Z when xi is in sp(2d)."""
    return np.asarray(Z) @ xi


def horizontal_lift(X: SiegelPoint, u: SiegelTangent):
    """Derivative of t -> section(X + t u) at t = 0.

    The result is tangent to Sp(2d, R) at section(X) and projects onto ``u``.
    """
    Bmh = spd_power(X.B, -0.5)
    dBmh = spd_power_derivative(X.B, -0.5, u.dB)
    dBh = spd_power_derivative(X.B, 0.5, u.dB)
    return from_blocks(dBmh, np.zeros_like(Bmh), u.dA @ Bmh + X.A @ dBmh, dBh)


def reduced_form_check(Z, v, w, level_tol=SP_TOL, tangency_tol=TANGENCY_TOL):
    """Both sides of Omega_Z(v, w) = -1/2 Omega_Sigma(T pi v, T pi w).

    ``Z`` must lie on M^-1(J) and ``v``, ``w`` must be tangent to it.
    """
    Z = np.asarray(Z, dtype=float)
    level = is_on_level_J(Z, level_tol)
    if not level:
        raise NotOnLevelSet(f"Z is not on the level set M = J (residual {level.residual:.3e})")
    scale = max(1.0, frob(Z))
    for name, t in (("v", v), ("w", w)):
        res = frob(momentum_differential(Z, t))
        if res > tangency_tol * scale * max(1.0, frob(t)):
            raise TangencyViolation(f"{name} is not tangent to the level set (residual {res:.3e})")
    lhs = omega_eval(Z, v, w)
    X = projection(Z)
    rhs = -0.5 * siegel_form(X, projection_differential(Z, v), projection_differential(Z, w))
    return lhs, rhs
