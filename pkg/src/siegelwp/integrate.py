"""Fixed-step time integration of wave packet states with invariant monitoring."""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .dynamics import (BranchTracker, HagedornState, HellerState, SimParams,
                       angular_momentum, hagedorn_rhs, hamiltonian, heller_rhs,
                       project_state, reduced_angular_momentum)
from .errors import BLost, EmptyRecord, NotPositiveDefinite, StepGuardViolation
from .reduction import is_on_level_J

__all__ = [
    "StepSpec",
    "TrajectoryRecord",
    "rk4_step",
    "strang_step",
    "integrate_trajectory",
    "convergence_slope",
    "drift_report",
    "Commutation",
    "compare_formulations",
]

SCHEMES = ("rk4", "strang")


@dataclass(frozen=True)
class StepSpec:
    dt: float
    t_end: float
    scheme: str = "rk4"
    sample_every: int = 1

    def __post_init__(self):
        if not self.dt > 0:
            raise ValueError(f"dt must be positive, got {self.dt}")
        if self.t_end < 0:
            raise ValueError(f"t_end must be non-negative, got {self.t_end}")
        if self.scheme not in SCHEMES:
            raise ValueError(f"scheme must be one of {SCHEMES}, got {self.scheme!r}")
        if int(self.sample_every) < 1:
            raise ValueError("sample_every must be >= 1")

    @property
    def n_steps(self) -> int:
        n = self.t_end / self.dt
        k = round(n)
        if abs(n - k) > 1e-9 * max(1.0, n):
            raise ValueError(f"t_end={self.t_end} is not a whole number of steps dt={self.dt}")
        return int(k)


@dataclass(frozen=True)
class TrajectoryRecord:
    """Sampled trajectory.  ``observables`` maps names to arrays aligned with ``times``.

    Hagedorn records carry ``energy``, ``momentum_residual``,
    ``onshell_residual``, ``argdetQ`` and ``J``; Heller records carry
    ``energy`` and ``J``.
    """

    kind: str
    times: np.ndarray
    states: tuple
    observables: dict
    prm: SimParams
    spec: StepSpec
    meta: dict = field(default_factory=dict)

    @property
    def d(self) -> int:
        return self.states[0].d

    def __len__(self) -> int:
        return len(self.times)


def _unpack(cls, x, d):
    try:
        return cls.unpack(x, d)
    except NotPositiveDefinite as exc:
        raise BLost(f"B left the positive-definite cone: {exc}") from None


def rk4_step(rhs, state, dt: float):
    """Classical fourth-order Runge-Kutta step; the phase rides along as a state component."""
    cls, d = type(state), state.d
    x = state.pack()
    k1 = rhs(state).pack()
    k2 = rhs(_unpack(cls, x + 0.5 * dt * k1, d)).pack()
    k3 = rhs(_unpack(cls, x + 0.5 * dt * k2, d)).pack()
    k4 = rhs(_unpack(cls, x + dt * k3, d)).pack()
    return _unpack(cls, x + dt / 6.0 * (k1 + 2 * k2 + 2 * k3 + k4), d)


def _kick(s: HagedornState, V, prm: SimParams, tau: float) -> HagedornState:
    H = np.atleast_2d(V.hessian(s.q))
    force = -np.asarray(V.gradient(s.q), dtype=float)
    if prm.corrected:
        force = force - 0.25 * prm.hbar * V.hessian_contract(s.q, (s.Q @ s.Q.conj().T).real)
    return HagedornState(s.q, s.p + tau * force, s.Q, s.P - tau * (H @ s.Q), s.S - tau * V(s.q))


def _drift(s: HagedornState, prm: SimParams, tau: float) -> HagedornState:
    m = prm.m
    return HagedornState(s.q + tau * s.p / m, s.p, s.Q + tau * s.P / m, s.P,
                         s.S + tau * (s.p @ s.p) / (2 * m))


def strang_step(state: HagedornState, V, prm: SimParams, dt: float) -> HagedornState:
    """Kick-drift-kick splitting of the extended Hamiltonian.

    Both sub-flows are exact: the kick freezes (q, Q), the drift freezes (p, P).
    The action S is split the same way (-V(q) in the kick, p^2/2m in the drift).
    """
    if not isinstance(state, HagedornState):
        raise TypeError("strang_step needs a HagedornState")
    s = _kick(state, V, prm, 0.5 * dt)
    s = _drift(s, prm, dt)
    return _kick(s, V, prm, 0.5 * dt)


def _observe(s, V, prm, tracker):
    if isinstance(s, HagedornState):
        return {
            "energy": hamiltonian("extended", s, V, prm),
            "momentum_residual": is_on_level_J(s.Z).residual,
            "onshell_residual": s.onshell_residual(),
            "argdetQ": tracker.value,
            "J": angular_momentum(s, prm),
        }
    return {
        "energy": hamiltonian("reduced_extended", s, V, prm),
        "J": reduced_angular_momentum(s, prm),
    }


def integrate_trajectory(state, V, prm: SimParams, spec: StepSpec, argdet: float | None = None,
                         meta: dict | None = None) -> TrajectoryRecord:
    """Integrate from ``state`` and sample observables every ``spec.sample_every`` steps.

    For Hagedorn states ``argdet`` seeds the branch of arg det Q (principal
    value by default).  On a branch-guard violation the partial record is
    attached to the raised :class:`StepGuardViolation`.
    """
    if isinstance(state, HagedornState):
        kind = "hagedorn"
        tracker = BranchTracker(state.Q, argdet)
        if spec.scheme == "rk4":
            def step(s):
                return rk4_step(lambda u: hagedorn_rhs(u, V, prm), s, spec.dt)
        else:
            def step(s):
                return strang_step(s, V, prm, spec.dt)
    elif isinstance(state, HellerState):
        kind = "heller"
        tracker = None
        if spec.scheme != "rk4":
            raise ValueError("Heller states support only the rk4 scheme")

        def step(s):
            return rk4_step(lambda u: heller_rhs(u, V, prm), s, spec.dt)
    else:
        raise TypeError(f"unsupported state type {type(state).__name__}")

    times, states, rows = [], [], []

    def sample(t, s):
        times.append(t)
        states.append(s)
        rows.append(_observe(s, V, prm, tracker))

    def freeze():
        obs = {k: np.array([r[k] for r in rows]) for k in (rows[0] if rows else {})}
        return TrajectoryRecord(kind, np.array(times), tuple(states), obs, prm, spec,
                                dict(meta or {}))

    n = spec.n_steps
    s = state
    sample(0.0, s)
    for i in range(1, n + 1):
        t = i * spec.dt
        try:
            s = step(s)
            if tracker is not None:
                tracker.update(s.Q)
        except StepGuardViolation as exc:
            raise StepGuardViolation(f"at t={t:.6g}: {exc}", record=freeze()) from None
        except BLost as exc:
            raise BLost(f"at t={t:.6g}: {exc}") from None
        if i % spec.sample_every == 0 or i == n:
            sample(t, s)
    return freeze()


def convergence_slope(dts, errors) -> float:
    """Least-squares slope of log(error) against log(dt)."""
    return float(np.polyfit(np.log(np.asarray(dts, float)), np.log(np.asarray(errors, float)), 1)[0])


def drift_report(records, error_fn=None) -> dict:
    """Maximum and final drift of every monitored invariant.

    ``records`` is one TrajectoryRecord or a sequence of them.  With several
    records and an ``error_fn(record) -> float`` (global error against an
    oracle) the report also carries the fitted convergence slope in dt.
    """
    if isinstance(records, TrajectoryRecord):
        records = [records]
    records = list(records)
    if not records or any(len(r) < 2 for r in records):
        raise EmptyRecord("drift report needs at least one integration step per record")
    per = [_summarize(r) for r in records]
    out = dict(per[0]) if len(per) == 1 else {"records": per}
    if error_fn is not None:
        dts = [r.spec.dt for r in records]
        errs = [float(error_fn(r)) for r in records]
        out["dt"] = dts
        out["errors"] = errs
        if len(records) > 1:
            out["slope"] = convergence_slope(dts, errs)
    return out


def _summarize(rec: TrajectoryRecord) -> dict:
    obs = rec.observables
    E = obs["energy"]
    dE = np.abs(E - E[0])
    J = obs["J"]
    dJ = np.linalg.norm((J - J[0]).reshape(len(J), -1), axis=1)
    out = {
        "kind": rec.kind,
        "dt": rec.spec.dt,
        "t_end": float(rec.times[-1]),
        "samples": len(rec),
        "energy_drift_max": float(dE.max()),
        "energy_drift_final": float(dE[-1]),
        "angular_momentum_drift_max": float(dJ.max()),
        "angular_momentum_drift_final": float(dJ[-1]),
    }
    for key in ("momentum_residual", "onshell_residual"):
        if key in obs:
            out[f"{key}_max"] = float(obs[key].max())
            out[f"{key}_final"] = float(obs[key][-1])
    return out


@dataclass(frozen=True)
class Commutation:
    """Worst gaps between a Hagedorn run projected down and the matching Heller run."""

    projection_gap: float
    phase_gap: float
    hagedorn: TrajectoryRecord
    heller: TrajectoryRecord


def compare_formulations(state: HagedornState, V, prm: SimParams, spec: StepSpec,
                         argdet: float | None = None) -> Commutation:
    """Integrate ``state`` and its projection side by side and measure how far they part.

    The Heller run starts from ``project_state(state)``.  At every sample the
    projection gap is ||P Q^-1 - (A + iB)||_F and the phase gap is
    |phi - (S - hbar/2 arg det Q)| with the tracked branch.
    """
    if argdet is None:
        argdet = float(np.angle(np.linalg.det(state.Q)))
    hag = integrate_trajectory(state, V, prm, spec, argdet=argdet)
    hel = integrate_trajectory(project_state(state, prm, argdet), V, prm, spec)
    proj = phase = 0.0
    for sh, sr, ad in zip(hag.states, hel.states, hag.observables["argdetQ"]):
        X = np.linalg.solve(sh.Q.T, sh.P.T).T
        proj = max(proj, float(np.linalg.norm(X - sr.X.C)))
        phase = max(phase, abs(sr.phi - (sh.S - 0.5 * prm.hbar * ad)))
    return Commutation(proj, phase, hag, hel)
