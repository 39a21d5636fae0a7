"""Wavefunction evaluation, Schrodinger residuals and grid expectation values."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.integrate import trapezoid

from .dynamics import HagedornState, HellerState, SimParams
from .errors import GridTooCoarse, ShapeMismatch, SingularQ

__all__ = [
    "Grid",
    "wavefunction",
    "schrodinger_residual",
    "residual_norm",
    "grid_for",
    "norm_on_grid",
    "expectation_energy",
]


def _points(x, d):
    x = np.asarray(x, dtype=float)
    single = x.ndim <= 1 and x.size == d
    X = x.reshape(1, d) if single else x.reshape(-1, d)
    return X, single


def _gaussian_data(s, prm):
    """(log |prefactor|, complex width matrix C, phase constant) of a state."""
    d = s.d
    if isinstance(s, HellerState):
        _, logdet = np.linalg.slogdet(s.B)
        logpre = 0.25 * logdet - 0.25 * d * np.log(np.pi * prm.hbar)
        return logpre, s.X.C, s.phi
    if isinstance(s, HagedornState):
        if np.linalg.cond(s.Q) > 1e12:
            raise SingularQ("Q is numerically singular")
        C = np.linalg.solve(s.Q.T, s.P.T).T
        C = 0.5 * (C + C.T)
        _, logabs = np.linalg.slogdet(s.Q)
        logpre = -0.5 * logabs - 0.25 * d * np.log(np.pi * prm.hbar)
        return logpre, C, s.S
    raise ShapeMismatch(f"unsupported state type {type(s).__name__}")


def wavefunction(s, x, prm: SimParams, argdet: float | None = None):
    """psi(x) for a Heller or Hagedorn state.

    For Hagedorn states (det Q)^-1/2 uses ``argdet`` as the branch of
    arg det Q (principal value when omitted).  ``x`` is one point of shape
    (d,) or a batch of shape (n, d).
    """
    X, single = _points(x, s.d)
    logpre, C, ph = _gaussian_data(s, prm)
    if isinstance(s, HagedornState):
        if argdet is None:
            argdet = float(np.angle(np.linalg.det(s.Q)))
        logpre = logpre - 0.5j * argdet
    y = X - s.q
    expo = 0.5 * np.einsum("ni,ij,nj->n", y, C, y) + y @ s.p + ph
    psi = np.exp(logpre + 1j * expo / prm.hbar)
    return psi[0] if single else psi


def _local_residual(s, sdot, V, X, prm):
    """(i hbar d_t psi + hbar^2/2m Laplacian psi - V psi) / psi at rows of X."""
    hbar, m = prm.hbar, prm.m
    y = X - s.q
    if isinstance(s, HellerState):
        C = s.X.C
        Cdot = sdot.A + 1j * sdot.B
        dlogpre = 0.25 * np.trace(np.linalg.solve(s.B, sdot.B))
        phdot = sdot.phi
    else:
        Qinv = np.linalg.inv(s.Q)
        C = s.P @ Qinv
        C = 0.5 * (C + C.T)
        Cdot = (sdot.P - C @ sdot.Q) @ Qinv
        Cdot = 0.5 * (Cdot + Cdot.T)
        dlogpre = -0.5 * np.trace(Qinv @ sdot.Q)
        phdot = sdot.S
    Cy = y @ C
    dexpo = (0.5 * np.einsum("ni,ij,nj->n", y, Cdot, y) - Cy @ sdot.q
             + y @ sdot.p - s.p @ sdot.q + phdot)
    dt_log = dlogpre + 1j * dexpo / hbar
    grad = Cy + s.p
    lap = 1j * np.trace(C) / hbar - np.einsum("ni,ni->n", grad, grad) / hbar**2
    return 1j * hbar * dt_log + hbar**2 / (2 * m) * lap - V.values(X)


def schrodinger_residual(s, sdot, V, x, prm: SimParams, argdet: float | None = None):
    """i hbar d_t psi - (-hbar^2/2m Laplacian + V) psi at ``x``.

    ``sdot`` are the parameter rates (from heller_rhs / hagedorn_rhs on the
    same state); time and space derivatives of the Gaussian are analytic.
    """
    X, single = _points(x, s.d)
    r = _local_residual(s, sdot, V, X, prm) * wavefunction(s, X, prm, argdet)
    return r[0] if single else r


@dataclass(frozen=True)
class Grid:
    """Tensor grid centred on q spanning +-``half_width`` marginal standard deviations.

    ``points`` per axis defaults to 2048 in one dimension and 256 in two.
    """

    points: int | None = None
    half_width: float = 10.0


def _sigmas(s, prm):
    """Marginal standard deviations of |psi|^2 along each axis, and the smallest principal one."""
    if isinstance(s, HellerState):
        Binv = np.linalg.inv(s.B)
    else:
        Binv = (s.Q @ s.Q.conj().T).real
    cov = 0.5 * prm.hbar * Binv
    return np.sqrt(np.diag(cov)), float(np.sqrt(np.linalg.eigvalsh(cov)[0]))


def grid_for(s, prm: SimParams, grid: Grid = Grid()):
    """Axis arrays and flattened (n, d) points of a grid centred on q."""
    if s.d > 2:
        raise GridTooCoarse(f"grid quadrature supports d <= 2, got d={s.d}")
    sig, sig_min = _sigmas(s, prm)
    if grid.half_width < 5.0:
        raise GridTooCoarse(f"grid window +-{grid.half_width} sigma is below the 5 sigma minimum")
    n = grid.points or (2048 if s.d == 1 else 256)
    axes = [np.linspace(qk - grid.half_width * sk, qk + grid.half_width * sk, n)
            for qk, sk in zip(s.q, sig)]
    spacing = max(ax[1] - ax[0] for ax in axes)
    if spacing > 0.5 * sig_min:
        raise GridTooCoarse(
            f"grid spacing {spacing:.3e} does not resolve packet width {sig_min:.3e}")
    mesh = np.meshgrid(*axes, indexing="ij")
    X = np.stack([g.ravel() for g in mesh], axis=-1)
    return axes, X


def _trapz(values, axes):
    out = values.reshape([len(a) for a in axes])
    for a in reversed(axes):
        out = trapezoid(out, a, axis=-1)
    return out


def norm_on_grid(s, prm: SimParams, grid: Grid = Grid()) -> float:
    axes, X = grid_for(s, prm, grid)
    return float(_trapz(np.abs(wavefunction(s, X, prm)) ** 2, axes))


def residual_norm(s, sdot, V, prm: SimParams, grid: Grid = Grid()) -> float:
    """L2 norm of the Schrodinger residual over a grid (d <= 2)."""
    axes, X = grid_for(s, prm, grid)
    r = _local_residual(s, sdot, V, X, prm)
    w = np.abs(wavefunction(s, X, prm)) ** 2
    return float(np.sqrt(_trapz(np.abs(r) ** 2 * w, axes)))


def expectation_energy(s: HellerState, V, prm: SimParams, grid: Grid = Grid()) -> float:
    """<psi, H psi> by trapezoid quadrature, with H psi / psi evaluated analytically."""
    axes, X = grid_for(s, prm, grid)
    y = X - s.q
    C = s.X.C
    grad = y @ C + s.p
    lap = 1j * np.trace(C) / prm.hbar - np.einsum("ni,ni->n", grad, grad) / prm.hbar**2
    local = -prm.hbar**2 / (2 * prm.m) * lap + V.values(X)
    w = np.abs(wavefunction(s, X, prm)) ** 2
    return float(_trapz((local * w).real, axes))
