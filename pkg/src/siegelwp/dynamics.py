"""Gaussian wave packet dynamics in the lifted (Hagedorn) and reduced (Heller) form.

Hagedorn states carry (q, p, Q, P, S) with complex Q, P on the constraint
surface, i.e. [[Re Q, Im Q], [Re P, Im P]] in Sp(2d, R).  Heller states carry
(q, p, A + iB, phi) on T*R^d x Sigma_d.  The two are related by
A + iB = P Q^-1 and

    phi = S - (hbar / 2) arg det Q,

where arg det Q is tracked continuously along a trajectory.  With
``corrected=True`` the momentum equation picks up the hbar term coming from
the extended Hamiltonian; without it the equations are the classical ones,
exact for quadratic V.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import NotPositiveDefinite, OffShell, ShapeMismatch, SingularQ, StepGuardViolation
from .siegel import SiegelPoint, riccati_rhs, section
from .spgroup import ComplexQP, UnitaryPair, blocks, embed_unitary, from_blocks

__all__ = [
    "SimParams",
    "HagedornState",
    "HellerState",
    "HagedornRates",
    "HellerRates",
    "hagedorn_rhs",
    "heller_rhs",
    "hamiltonian",
    "diamond",
    "angular_momentum",
    "reduced_angular_momentum",
    "rotate_hagedorn",
    "rotate_heller",
    "BranchTracker",
    "project_state",
    "resymplectify",
    "lift_state",
    "project_rates",
    "hamiltonian_vector_field",
    "hamiltonian_time_derivative",
]

ONSHELL_TOL = 1e-6
HAMILTONIAN_LEVELS = ("lifted_quadratic", "reduced_quadratic", "extended", "reduced_extended")


@dataclass(frozen=True)
class SimParams:
    m: float = 1.0
    hbar: float = 1.0
    corrected: bool = False

    def __post_init__(self):
        if not self.m > 0:
            raise ValueError(f"mass must be positive, got {self.m}")
        if not self.hbar > 0:
            raise ValueError(f"hbar must be positive, got {self.hbar}")


def _vec(x, d=None):
    x = np.atleast_1d(np.asarray(x, dtype=float)).reshape(-1)
    if d is not None and x.shape != (d,):
        raise ShapeMismatch(f"expected a vector of length {d}, got {x.shape}")
    return x


@dataclass(frozen=True)
class HagedornState:
    q: np.ndarray
    p: np.ndarray
    Q: np.ndarray
    P: np.ndarray
    S: float = 0.0

    def __post_init__(self):
        Q = np.atleast_2d(np.asarray(self.Q, dtype=complex))
        P = np.atleast_2d(np.asarray(self.P, dtype=complex))
        d = Q.shape[0]
        if Q.shape != (d, d) or P.shape != (d, d):
            raise ShapeMismatch(f"Q and P must be ({d}, {d}), got {Q.shape}, {P.shape}")
        object.__setattr__(self, "q", _vec(self.q, d))
        object.__setattr__(self, "p", _vec(self.p, d))
        object.__setattr__(self, "Q", Q)
        object.__setattr__(self, "P", P)
        object.__setattr__(self, "S", float(self.S))

    @property
    def d(self) -> int:
        return self.Q.shape[0]

    @property
    def qp(self) -> ComplexQP:
        return ComplexQP(self.Q, self.P)

    @property
    def Z(self) -> np.ndarray:
        """Real phase-space matrix [[Re Q, Im Q], [Re P, Im P]]."""
        return from_blocks(self.Q.real, self.Q.imag, self.P.real, self.P.imag)

    def onshell_residual(self) -> float:
        return self.qp.onshell_residual()

    def pack(self) -> np.ndarray:
        return np.concatenate([self.q, self.p, self.Q.real.ravel(), self.Q.imag.ravel(),
                               self.P.real.ravel(), self.P.imag.ravel(), [self.S]])

    @classmethod
    def unpack(cls, x, d: int) -> "HagedornState":
        return _trusted(cls, zip(("q", "p", "Q", "P", "S"), _unpack_hagedorn(x, d)))

    @classmethod
    def from_phase_point(cls, q, p, Z, S=0.0) -> "HagedornState":
        Q1, Q2, P1, P2 = blocks(Z)
        return cls(q, p, Q1 + 1j * Q2, P1 + 1j * P2, S)

    @classmethod
    def coherent(cls, q, p) -> "HagedornState":
        d = _vec(q).size
        return cls(q, p, np.eye(d), 1j * np.eye(d), 0.0)


@dataclass(frozen=True)
class HellerState:
    q: np.ndarray
    p: np.ndarray
    X: SiegelPoint
    phi: float = 0.0

    def __post_init__(self):
        d = self.X.d
        object.__setattr__(self, "q", _vec(self.q, d))
        object.__setattr__(self, "p", _vec(self.p, d))
        object.__setattr__(self, "phi", float(self.phi))

    @property
    def d(self) -> int:
        return self.X.d

    @property
    def A(self) -> np.ndarray:
        return self.X.A

    @property
    def B(self) -> np.ndarray:
        return self.X.B

    def pack(self) -> np.ndarray:
        return np.concatenate([self.q, self.p, self.A.ravel(), self.B.ravel(), [self.phi]])

    @classmethod
    def unpack(cls, x, d: int) -> "HellerState":
        q, p, A, B, phi = _unpack_heller(x, d)
        return _trusted(cls, (("q", q), ("p", p), ("X", SiegelPoint.trusted(A, B)), ("phi", phi)))

    @classmethod
    def from_AB(cls, q, p, A, B, phi=0.0) -> "HellerState":
        return cls(q, p, SiegelPoint(np.atleast_2d(A), np.atleast_2d(B)), phi)

    @classmethod
    def coherent(cls, q, p) -> "HellerState":
        d = _vec(q).size
        return cls(q, p, SiegelPoint.base(d), 0.0)


def _trusted(cls, fields):
    # unpacked vectors already have the right shapes and dtypes
    obj = object.__new__(cls)
    for k, v in fields:
        object.__setattr__(obj, k, v)
    return obj


def _unpack_hagedorn(x, d):
    x = np.asarray(x, dtype=float)
    n = d * d
    q, p = x[:d], x[d:2 * d]
    o = 2 * d
    Q = (x[o:o + n] + 1j * x[o + n:o + 2 * n]).reshape(d, d)
    P = (x[o + 2 * n:o + 3 * n] + 1j * x[o + 3 * n:o + 4 * n]).reshape(d, d)
    return q, p, Q, P, float(x[o + 4 * n])


def _unpack_heller(x, d):
    x = np.asarray(x, dtype=float)
    n = d * d
    o = 2 * d
    return (x[:d], x[d:o], x[o:o + n].reshape(d, d), x[o + n:o + 2 * n].reshape(d, d),
            float(x[o + 2 * n]))


@dataclass(frozen=True)
class HagedornRates:
    q: np.ndarray
    p: np.ndarray
    Q: np.ndarray
    P: np.ndarray
    S: float

    def pack(self) -> np.ndarray:
        return np.concatenate([self.q, self.p, self.Q.real.ravel(), self.Q.imag.ravel(),
                               self.P.real.ravel(), self.P.imag.ravel(), [self.S]])


@dataclass(frozen=True)
class HellerRates:
    q: np.ndarray
    p: np.ndarray
    A: np.ndarray
    B: np.ndarray
    phi: float

    def pack(self) -> np.ndarray:
        return np.concatenate([self.q, self.p, self.A.ravel(), self.B.ravel(), [self.phi]])


# -- vector fields -----------------------------------------------------------

def hagedorn_rhs(s: HagedornState, V, prm: SimParams) -> HagedornRates:
    m, hbar = prm.m, prm.hbar
    H = np.atleast_2d(V.hessian(s.q))
    pdot = -np.asarray(V.gradient(s.q), dtype=float)
    if prm.corrected:
        G = (s.Q @ s.Q.conj().T).real
        pdot = pdot - 0.25 * hbar * V.hessian_contract(s.q, G)
    Sdot = s.p @ s.p / (2 * m) - V(s.q)
    return HagedornRates(s.p / m, pdot, s.P / m, -H @ s.Q, Sdot)


def heller_rhs(s: HellerState, V, prm: SimParams) -> HellerRates:
    m, hbar = prm.m, prm.hbar
    H = np.atleast_2d(V.hessian(s.q))
    Cdot = riccati_rhs(s.X.C, H, m)
    pdot = -np.asarray(V.gradient(s.q), dtype=float)
    if prm.corrected:
        pdot = pdot - 0.25 * hbar * V.hessian_contract(s.q, np.linalg.inv(s.B))
    phidot = s.p @ s.p / (2 * m) - V(s.q) - hbar / (2 * m) * np.trace(s.B)
    return HellerRates(s.p / m, pdot, Cdot.real, Cdot.imag, phidot)


# -- Hamiltonians ------------------------------------------------------------

def _lifted_quadratic(Q, P, H, m):
    return (0.5 / m * np.sum(np.abs(P) ** 2)
            + 0.5 * np.trace(Q.conj().T @ H @ Q).real)


def _reduced_quadratic(A, B, H, m):
    Binv = np.linalg.inv(B)
    return 0.5 * np.trace(Binv @ ((A @ A + B @ B) / m + H))


def hamiltonian(level: str, state, V, prm: SimParams) -> float:
    """Evaluate one of the four Hamiltonians.

    ``lifted_quadratic`` and ``extended`` need a HagedornState,
    ``reduced_quadratic`` and ``reduced_extended`` a HellerState.  The
    Hessian of V is taken at the state's position q.
    """
    if level not in HAMILTONIAN_LEVELS:
        raise ValueError(f"unknown Hamiltonian level {level!r}")
    lifted = level in ("lifted_quadratic", "extended")
    want = HagedornState if lifted else HellerState
    if not isinstance(state, want):
        raise ShapeMismatch(f"level {level!r} needs a {want.__name__}, got {type(state).__name__}")
    if state.d != V.dim:
        raise ShapeMismatch(f"state has d={state.d} but potential has d={V.dim}")
    H = np.atleast_2d(V.hessian(state.q))
    if lifted:
        inner = _lifted_quadratic(state.Q, state.P, H, prm.m)
    else:
        inner = _reduced_quadratic(state.A, state.B, H, prm.m)
    if level in ("lifted_quadratic", "reduced_quadratic"):
        return float(inner)
    return float(state.p @ state.p / (2 * prm.m) + V(state.q) + 0.5 * prm.hbar * inner)


def _energy(state, V, prm):
    level = "extended" if isinstance(state, HagedornState) else "reduced_extended"
    return hamiltonian(level, state, V, prm)


# -- angular momentum and SO(d) actions -------------------------------------

def diamond(q, p) -> np.ndarray:
    """(q <> p)_ij = q_j p_i - q_i p_j."""
    return np.outer(p, q) - np.outer(q, p)


def angular_momentum(s: HagedornState, prm: SimParams) -> np.ndarray:
    Q, P = s.Q, s.P
    mat = (P @ Q.conj().T - Q @ P.conj().T).real
    return diamond(s.q, s.p) + 0.5 * prm.hbar * mat


def reduced_angular_momentum(s: HellerState, prm: SimParams) -> np.ndarray:
    Binv = np.linalg.inv(s.B)
    return diamond(s.q, s.p) - 0.5 * prm.hbar * (Binv @ s.A - s.A @ Binv)


def rotate_hagedorn(R, s: HagedornState) -> HagedornState:
    return HagedornState(R @ s.q, R @ s.p, R @ s.Q, R @ s.P, s.S)


def rotate_heller(R, s: HellerState) -> HellerState:
    return HellerState(R @ s.q, R @ s.p, SiegelPoint(R @ s.A @ R.T, R @ s.B @ R.T), s.phi)


# -- projection between the two formulations --------------------------------

class BranchTracker:
    """Continuous determination of arg det Q along one trajectory.

    Each update adds the principal-branch increment arg(det Q_new / det Q_old);
    increments of pi/2 or more are refused because the branch can no longer
    be trusted.  One tracker per trajectory; not shared across threads.
    """

    LIMIT = np.pi / 2

    def __init__(self, Q, value: float | None = None):
        self.det = complex(np.linalg.det(np.atleast_2d(Q)))
        if self.det == 0:
            raise SingularQ("det Q vanishes")
        self.value = float(np.angle(self.det)) if value is None else float(value)

    def increment(self, Q) -> float:
        det = complex(np.linalg.det(Q))
        if det == 0:
            raise SingularQ("det Q vanishes")
        return float(np.angle(det / self.det))

    def update(self, Q) -> float:
        inc = self.increment(Q)
        if abs(inc) >= self.LIMIT:
            raise StepGuardViolation(
                f"arg det Q changed by {inc:.3f} rad in one step (limit pi/2); reduce dt")
        self.det = complex(np.linalg.det(Q))
        self.value += inc
        return self.value


def project_state(s: HagedornState, prm: SimParams, argdet: float | None = None) -> HellerState:
    """Heller state (q, p, P Q^-1, S - hbar/2 arg det Q) of a Hagedorn state.

    ``argdet`` is the tracked branch of arg det Q; the principal value is used
    when omitted.
    """
    res = s.onshell_residual()
    if res > ONSHELL_TOL:
        raise OffShell(f"(Q, P) is off-shell (residual {res:.3e})")
    if np.linalg.cond(s.Q) > 1e12:
        raise SingularQ("Q is numerically singular")
    X = np.linalg.solve(s.Q.T, s.P.T).T
    if argdet is None:
        argdet = float(np.angle(np.linalg.det(s.Q)))
    phi = s.S - 0.5 * prm.hbar * argdet
    return HellerState(s.q, s.p, SiegelPoint.from_complex(0.5 * (X + X.T)), phi)


def resymplectify(s: HagedornState) -> HagedornState:
    """Opt-in repair of on-shell drift; integrators never call this.

    Keeps X = sym(P Q^-1) and replaces Q by Q G^-1/2 with G = Q^* Im(X) Q
    Hermitian positive definite, then sets P = X Q.  The projection to the
    Siegel space, arg det Q and S are all unchanged.
    """
    if np.linalg.cond(s.Q) > 1e12:
        raise SingularQ("Q is numerically singular")
    X = np.linalg.solve(s.Q.T, s.P.T).T
    X = 0.5 * (X + X.T)
    G = s.Q.conj().T @ X.imag @ s.Q
    lam, W = np.linalg.eigh(0.5 * (G + G.conj().T))
    if lam[0] <= 0:
        raise NotPositiveDefinite("Im(P Q^-1) is not positive definite; state is too far off-shell")
    Q = s.Q @ (W * lam ** -0.5) @ W.conj().T
    return HagedornState(s.q, s.p, Q, X @ Q, s.S)


def lift_state(s: HellerState, prm: SimParams, u: UnitaryPair | None = None):
    """Hagedorn state over ``s`` in the fiber labelled by ``u`` (default identity).

    Returns ``(state, argdet)`` where ``argdet`` is the principal arg det Q
    used in the phase dictionary.
    """
    Z = section(s.X)
    if u is not None:
        Z = Z @ embed_unitary(u)
    Q1, Q2, P1, P2 = blocks(Z)
    Q = Q1 + 1j * Q2
    argdet = float(np.angle(np.linalg.det(Q)))
    S = s.phi + 0.5 * prm.hbar * argdet
    return HagedornState(s.q, s.p, Q, P1 + 1j * P2, S), argdet


def project_rates(s: HagedornState, r: HagedornRates, prm: SimParams) -> HellerRates:
    """Push Hagedorn rates forward to Heller rates at project_state(s).

    The phase rate includes the derivative of -hbar/2 arg det Q, which is
    -hbar/2 Im tr(Q^-1 Qdot).
    """
    Qinv = np.linalg.inv(s.Q)
    X = s.P @ Qinv
    Xdot = (r.P - X @ r.Q) @ Qinv
    Xdot = 0.5 * (Xdot + Xdot.T)
    phidot = r.S - 0.5 * prm.hbar * np.trace(Qinv @ r.Q).imag
    return HellerRates(r.q, r.p, Xdot.real, Xdot.imag, phidot)


# -- Hamiltonian vector fields from the symplectic forms ---------------------

def _sym_basis(d):
    out = []
    for j in range(d):
        for k in range(j, d):
            E = np.zeros((d, d))
            E[j, k] = E[k, j] = 1.0
            out.append(E)
    return out


def _heller_coords(s: HellerState):
    iu = np.triu_indices(s.d)
    return np.concatenate([s.q, s.p, s.A[iu], s.B[iu]])


def _heller_from_coords(x, d):
    iu = np.triu_indices(d)
    n = len(iu[0])
    A = np.zeros((d, d))
    B = np.zeros((d, d))
    A[iu] = x[2 * d:2 * d + n]
    B[iu] = x[2 * d + n:2 * d + 2 * n]
    A = A + np.triu(A, 1).T
    B = B + np.triu(B, 1).T
    return HellerState(x[:d], x[d:2 * d], SiegelPoint(A, B))


def _heller_form_matrix(s: HellerState, hbar):
    """Matrix W with Omega_bar(X, Y) = X^T W Y in (q, p, triu A, triu B) coordinates."""
    d = s.d
    basis = _sym_basis(d)
    n = len(basis)
    N = 2 * d + 2 * n
    W = np.zeros((N, N))
    W[:d, d:2 * d] = np.eye(d)
    W[d:2 * d, :d] = -np.eye(d)
    Binv = np.linalg.inv(s.B)
    dBinv = [-Binv @ E @ Binv for E in basis]
    a0, b0 = 2 * d, 2 * d + n
    for i, Ei in enumerate(basis):
        for j, Ej in enumerate(basis):
            # (hbar/4) dBinv ^ dA on (dB = E_i, dA = E_j) pairs
            val = 0.25 * hbar * np.sum(dBinv[i] * Ej)
            W[b0 + i, a0 + j] = val
            W[a0 + j, b0 + i] = -val
    return W


def _hagedorn_form_matrix(d, hbar):
    n = 2 * d * d
    N = 2 * d + 2 * n
    W = np.zeros((N, N))
    W[:d, d:2 * d] = np.eye(d)
    W[d:2 * d, :d] = -np.eye(d)
    o = 2 * d
    W[o:o + n, o + n:o + 2 * n] = 0.5 * hbar * np.eye(n)
    W[o + n:o + 2 * n, o:o + n] = -0.5 * hbar * np.eye(n)
    return W


def _fd_gradient(f, x, h):
    g = np.empty_like(x)
    for k in range(x.size):
        e = np.zeros_like(x)
        e[k] = h
        g[k] = (f(x + e) - f(x - e)) / (2 * h)
    return g


def hamiltonian_vector_field(state, V, prm: SimParams, h: float = 1e-6):
    """Solve i_X Omega = dH with dH from central differences.

    Uses the extended Hamiltonian with the hbar/2-weighted form for Hagedorn
    states, and the reduced pair for Heller states.  Returns rates for the
    canonical variables only (``S``/``phi`` are set to NaN); Heller rates
    come back as full symmetric matrices.
    """
    d = state.d
    if isinstance(state, HagedornState):
        x0 = state.pack()[:-1]

        def H(x):
            q, p, Q, P, _ = _unpack_hagedorn(np.append(x, 0.0), d)
            return hamiltonian("extended", HagedornState(q, p, Q, P), V, prm)

        W = _hagedorn_form_matrix(d, prm.hbar)
        X = np.linalg.solve(W.T, _fd_gradient(H, x0, h))
        q, p, Q, P, _ = _unpack_hagedorn(np.append(X, 0.0), d)
        return HagedornRates(q, p, Q, P, np.nan)
    if isinstance(state, HellerState):
        x0 = _heller_coords(state)

        def H(x):
            return hamiltonian("reduced_extended", _heller_from_coords(x, d), V, prm)

        W = _heller_form_matrix(state, prm.hbar)
        X = np.linalg.solve(W.T, _fd_gradient(H, x0, h))
        iu = np.triu_indices(d)
        n = len(iu[0])
        Ad = np.zeros((d, d))
        Bd = np.zeros((d, d))
        Ad[iu] = X[2 * d:2 * d + n]
        Bd[iu] = X[2 * d + n:]
        Ad = Ad + np.triu(Ad, 1).T
        Bd = Bd + np.triu(Bd, 1).T
        return HellerRates(X[:d], X[d:2 * d], Ad, Bd, np.nan)
    raise ShapeMismatch(f"unsupported state type {type(state).__name__}")


def hamiltonian_time_derivative(state, rates, V, prm: SimParams, h: float = 1e-4) -> float:
    """dH/dt along ``rates`` by a fourth-order directional difference."""
    cls = type(state)
    x0 = state.pack()
    v = rates.pack()
    v = np.where(np.isfinite(v), v, 0.0)
    d = state.d

    def H(eps):
        return _energy(cls.unpack(x0 + eps * v, d), V, prm)

    return (-H(2 * h) + 8 * H(h) - 8 * H(-h) + H(-2 * h)) / (12 * h)
