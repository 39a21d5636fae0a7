"""Random fixtures for property checks: symmetric, SPD, symplectic, unitary.

Every sampler takes a ``numpy.random.Generator`` so batches are reproducible
under a fixed seed.
"""

import numpy as np
from scipy.linalg import expm

from .siegel import SiegelPoint
from .spgroup import ComplexQP, UnitaryPair, standard_J, to_complex

SYMPLECTIC_NORM_BOUND = 2.0


def random_symmetric(d, rng, scale=1.0):
    G = rng.standard_normal((d, d))
    return scale * 0.5 * (G + G.T)


def random_skew(n, rng, scale=1.0):
    G = rng.standard_normal((n, n))
    return scale * 0.5 * (G - G.T)


def random_spd(d, rng, eps=0.1):
    G = rng.standard_normal((d, d)) / np.sqrt(d)
    return G @ G.T + eps * np.eye(d)


def random_orthogonal(n, rng):
    Qm, R = np.linalg.qr(rng.standard_normal((n, n)))
    return Qm * np.sign(np.diag(R))


def random_rotation(d, rng):
    R = random_orthogonal(d, rng)
    if np.linalg.det(R) < 0:
        R[:, 0] = -R[:, 0]
    return R


def random_unitary_pair(d, rng):
    Z = rng.standard_normal((d, d)) + 1j * rng.standard_normal((d, d))
    W, R = np.linalg.qr(Z)
    W = W * (np.diag(R) / np.abs(np.diag(R)))
    return UnitaryPair(W.real, W.imag)


def random_symplectic(d, rng, bound=SYMPLECTIC_NORM_BOUND):
    """exp(J Sym) with the generator scaled so that ||result||_2 <= bound."""
    H = standard_J(d) @ random_symmetric(2 * d, rng)
    nrm = np.linalg.norm(H, 2)
    H *= rng.uniform(0.1, 1.0) * np.log(bound) / nrm
    return expm(H)


def random_siegel_point(d, rng):
    return SiegelPoint(random_symmetric(d, rng), random_spd(d, rng, eps=0.3))


def random_on_shell_qp(d, rng) -> ComplexQP:
    return to_complex(random_symplectic(d, rng))


def random_sp_algebra(d, rng, scale=1.0):
    """J @ Sym: an element of the Lie algebra sp(2d, R)."""
    return standard_J(d) @ random_symmetric(2 * d, rng, scale)


def random_u_algebra(d, rng):
    """Element [[a, b], [-b, a]] of sp(2d) intersected with o(2d); a skew, b symmetric."""
    a = random_skew(d, rng)
    b = random_symmetric(d, rng)
    return np.block([[a, b], [-b, a]])
