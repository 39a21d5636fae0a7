"""Potential models: value, gradient and Hessian of V on R^d.

A model may also supply ``hessian_contract(q, G)``, the vector with entries
sum_ij d_k H_ij(q) G_ij for symmetric G.  That is the third-derivative term
in the corrected equations of motion.  When absent it falls back to central
differences of the Hessian.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable, Optional

import numpy as np

from .errors import ConfigError

__all__ = [
    "PotentialModel",
    "quadratic",
    "harmonic",
    "free",
    "quartic_1d",
    "radial_anharmonic",
    "register_potential",
    "make_potential",
    "available_potentials",
    "check_consistency",
]


@dataclass(frozen=True)
class PotentialModel:
    name: str
    dim: int
    value: Callable
    gradient: Callable
    hessian: Callable
    contract: Optional[Callable] = None
    is_quadratic: bool = False
    vectorized: bool = False
    params: dict = field(default_factory=dict)

    def __call__(self, q) -> float:
        return float(self.value(np.asarray(q, dtype=float)))

    def values(self, X) -> np.ndarray:
        """Evaluate V at every row of ``X`` (shape (n, d))."""
        X = np.asarray(X, dtype=float)
        if self.vectorized:
            return np.asarray(self.value(X), dtype=float)
        return np.array([self.value(x) for x in X])

    def hessian_contract(self, q, G) -> np.ndarray:
        q = np.asarray(q, dtype=float)
        if self.is_quadratic:
            return np.zeros(self.dim)
        if self.contract is not None:
            return np.asarray(self.contract(q, G), dtype=float)
        h = 1e-6 * max(1.0, float(np.linalg.norm(q)))
        out = np.empty(self.dim)
        for k in range(self.dim):
            e = np.zeros(self.dim)
            e[k] = h
            dH = (self.hessian(q + e) - self.hessian(q - e)) / (2 * h)
            out[k] = np.sum(dH * G)
        return out


def quadratic(K, b=None, c=0.0) -> PotentialModel:
    """V(x) = x^T K x / 2 + b.x + c."""
    K = np.atleast_2d(np.asarray(K, dtype=float))
    K = 0.5 * (K + K.T)
    d = K.shape[0]
    b = np.zeros(d) if b is None else np.asarray(b, dtype=float).reshape(d)
    c = float(c)

    def value(x):
        return 0.5 * np.einsum("...i,ij,...j->...", x, K, x) + x @ b + c

    return PotentialModel(
        name="quadratic", dim=d, value=value,
        gradient=lambda q: K @ q + b,
        hessian=lambda q: K.copy(),
        is_quadratic=True, vectorized=True,
        params={"K": K.tolist(), "b": b.tolist(), "c": c},
    )


def harmonic(d=1, omega=1.0, m=1.0) -> PotentialModel:
    return quadratic(m * omega**2 * np.eye(d))


def free(d=1) -> PotentialModel:
    return quadratic(np.zeros((d, d)))


def quartic_1d(omega2=1.0, lam=0.1) -> PotentialModel:
    """V(x) = omega2 x^2 / 2 + lam x^4 in one dimension."""
    omega2 = float(omega2)
    lam = float(lam)

    def value(x):
        x = x[..., 0]
        return 0.5 * omega2 * x**2 + lam * x**4

    return PotentialModel(
        name="quartic_1d", dim=1, value=value,
        gradient=lambda q: np.array([omega2 * q[0] + 4 * lam * q[0] ** 3]),
        hessian=lambda q: np.array([[omega2 + 12 * lam * q[0] ** 2]]),
        contract=lambda q, G: np.array([24 * lam * q[0] * np.asarray(G)[0, 0]]),
        vectorized=True,
        params={"omega2": omega2, "lam": lam},
    )


def radial_anharmonic(d=3, a=1.0, lam=0.1) -> PotentialModel:
    """V(q) = a |q|^2 / 2 + lam |q|^4, invariant under SO(d)."""
    a = float(a)
    lam = float(lam)
    I = np.eye(d)

    def value(x):
        r2 = np.sum(x * x, axis=-1)
        return 0.5 * a * r2 + lam * r2**2

    def hessian(q):
        return (a + 4 * lam * (q @ q)) * I + 8 * lam * np.outer(q, q)

    def contract(q, G):
        G = np.asarray(G)
        return 8 * lam * (np.trace(G) * q + 2 * (G @ q))

    return PotentialModel(
        name="radial_anharmonic", dim=d, value=value,
        gradient=lambda q: (a + 4 * lam * (q @ q)) * q,
        hessian=hessian, contract=contract, vectorized=True,
        params={"a": a, "lam": lam},
    )


_REGISTRY: dict[str, Callable[..., PotentialModel]] = {}


def register_potential(name: str, factory: Callable[..., PotentialModel]) -> None:
    """Make ``factory(**params)`` available to scenario files under ``name``."""
    _REGISTRY[name] = factory


def available_potentials():
    return sorted(_REGISTRY)


def make_potential(name: str, **params) -> PotentialModel:
    try:
        factory = _REGISTRY[name]
    except KeyError:
        raise ConfigError(f"unknown potential {name!r}; known: {available_potentials()}",
                          key="potential.name") from None
    try:
        return factory(**params)
    except TypeError as exc:
        raise ConfigError(f"bad parameters for potential {name!r}: {exc}",
                          key="potential") from None


register_potential("quadratic", quadratic)
register_potential("harmonic", harmonic)
register_potential("free", free)
register_potential("quartic_1d", quartic_1d)
register_potential("radial_anharmonic", radial_anharmonic)


def check_consistency(V: PotentialModel, points, h=1e-5, rtol=1e-6) -> float:
    """Worst relative mismatch of gradient/Hessian against central differences.

    Raises ValueError when the mismatch exceeds ``rtol``.
    """
    worst = 0.0
    for q in np.atleast_2d(np.asarray(points, dtype=float)):
        g = np.asarray(V.gradient(q))
        H = np.asarray(V.hessian(q))
        g_fd = np.empty(V.dim)
        H_fd = np.empty((V.dim, V.dim))
        for k in range(V.dim):
            e = np.zeros(V.dim)
            e[k] = h
            g_fd[k] = (V(q + e) - V(q - e)) / (2 * h)
            H_fd[:, k] = (np.asarray(V.gradient(q + e)) - np.asarray(V.gradient(q - e))) / (2 * h)
        for exact, approx in ((g, g_fd), (H, H_fd)):
            err = np.linalg.norm(exact - approx) / max(1.0, np.linalg.norm(exact))
            worst = max(worst, float(err))
    if worst > rtol:
        raise ValueError(f"potential {V.name!r} derivatives inconsistent (rel. error {worst:.2e})")
    return worst
