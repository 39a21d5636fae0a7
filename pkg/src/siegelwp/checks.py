"""Randomized verification batteries behind ``siegelwp check``.

Each check draws ``samples`` fixtures per dimension from a seeded generator,
records the worst residual and compares it with a fixed tolerance.  Failures
are report entries, never exceptions.
"""

from __future__ import annotations

from dataclasses import asdict, dataclass, field

import numpy as np

from .dynamics import (HagedornState, SimParams, angular_momentum, hagedorn_rhs, hamiltonian,
                       hamiltonian_time_derivative, hamiltonian_vector_field, heller_rhs,
                       project_rates, project_state, reduced_angular_momentum, rotate_hagedorn,
                       rotate_heller)
from .matlin import frob, spd_power, sym_eig
from .potentials import quadratic, quartic_1d, radial_anharmonic
from .reduction import (horizontal_lift, is_on_level_J, momentum_differential, momentum_map,
                        omega_eval, pairing_identity_check, projection, projection_differential,
                        projection_differential_fd, reduced_form_check, theta_eval)
from .sampling import (random_on_shell_qp, random_orthogonal, random_rotation, random_siegel_point,
                       random_skew, random_sp_algebra, random_spd, random_symmetric,
                       random_symplectic, random_u_algebra, random_unitary_pair)
from .siegel import (SiegelPoint, SiegelTangent, mobius_act, riccati_rhs, section, siegel_form,
                     siegel_metric)
from .spgroup import embed_unitary, from_blocks, is_symplectic, iwasawa, project_to_siegel

__all__ = ["CheckResult", "CheckReport", "SUITES", "run_suite"]

SUITES = ("geometry", "reduction", "dynamics")


@dataclass(frozen=True)
class CheckResult:
    suite: str
    name: str
    d: int
    samples: int
    worst: float
    tol: float

    @property
    def passed(self) -> bool:
        return bool(self.worst <= self.tol)

    def as_dict(self) -> dict:
        out = asdict(self)
        out["passed"] = self.passed
        return out


@dataclass
class CheckReport:
    seed: int
    samples: int
    results: list = field(default_factory=list)

    @property
    def empty(self) -> bool:
        return not self.results

    @property
    def passed(self) -> bool:
        return all(r.passed for r in self.results)

    def as_dict(self) -> dict:
        return {
            "seed": self.seed,
            "samples": self.samples,
            "passed": self.passed,
            "empty": self.empty,
            "results": [r.as_dict() for r in self.results],
        }


# -- geometry ------------------------------------------------------------------

def _spd_sqrt(d, rng):
    B = random_spd(d, rng)
    R = spd_power(B, 0.5)
    return max(frob(R @ R - B), frob(spd_power(B, -0.5) @ R - np.eye(d)))


def _sym_eig(d, rng):
    S = random_symmetric(d, rng)
    lam, V = sym_eig(S)
    return frob(V @ np.diag(lam) @ V.T - S) / max(1.0, frob(S))


def _sampled_generator(d, rng):
    return is_symplectic(random_symplectic(d, rng)).residual


def _action_law(d, rng):
    S1, S2 = random_symplectic(d, rng), random_symplectic(d, rng)
    X = random_siegel_point(d, rng)
    lhs = mobius_act(S1 @ S2, X)
    rhs = mobius_act(S1, mobius_act(S2, X))
    return frob(lhs.C - rhs.C)


def _transitivity(d, rng):
    X = random_siegel_point(d, rng)
    return frob(mobius_act(section(X), SiegelPoint.base(d)).C - X.C)


def _isotropy(d, rng):
    u = random_unitary_pair(d, rng)
    return frob(mobius_act(embed_unitary(u), SiegelPoint.base(d)).C - 1j * np.eye(d))


def _iwasawa(d, rng):
    S = random_symplectic(d, rng)
    P, L, u = iwasawa(S)
    lower = from_blocks(L, np.zeros((d, d)), P @ L, np.linalg.inv(L))
    return frob(lower @ embed_unitary(u) - S)


def _fiber_constant(d, rng):
    S = random_symplectic(d, rng)
    u = random_unitary_pair(d, rng)
    return frob(project_to_siegel(S @ embed_unitary(u)).C - project_to_siegel(S).C)


def _projection_formulas(d, rng):
    S = random_symplectic(d, rng)
    X = project_to_siegel(S)
    P, L, _ = iwasawa(S)
    iwa = P + 1j * spd_power(L, -1.0) @ spd_power(L, -1.0)
    return max(frob(X.C - projection(S).C), frob(X.C - iwa))


def _metric_vs_form(d, rng):
    X = random_siegel_point(d, rng)
    u = SiegelTangent(random_symmetric(d, rng), random_symmetric(d, rng))
    v = SiegelTangent(random_symmetric(d, rng), random_symmetric(d, rng))
    im = 0.5 * (siegel_metric(X, u, v).imag - siegel_metric(X, v, u).imag)
    return abs(im - siegel_form(X, u, v))


def _onshell_identities(d, rng):
    qp = random_on_shell_qp(d, rng)
    X = qp.P @ np.linalg.inv(qp.Q)
    A, B = X.real, X.imag
    Binv = np.linalg.inv(B)
    r1 = frob(qp.Q @ qp.Q.conj().T - Binv)
    r2 = frob(qp.P @ qp.Q.conj().T - qp.Q @ qp.P.conj().T - (A @ Binv - Binv @ A) - 2j * np.eye(d))
    return max(r1, r2)


GEOMETRY = [
    ("spd_sqrt_roundtrip", _spd_sqrt, 1e-10),
    ("sym_eig_reconstruction", _sym_eig, 1e-11),
    ("symplectic_sampler_membership", _sampled_generator, 1e-10),
    ("mobius_action_law", _action_law, 1e-9),
    ("section_transitivity", _transitivity, 1e-10),
    ("unitary_isotropy", _isotropy, 1e-10),
    ("iwasawa_roundtrip", _iwasawa, 1e-10),
    ("projection_fiber_constant", _fiber_constant, 1e-10),
    ("projection_formulas_agree", _projection_formulas, 1e-10),
    ("metric_imaginary_part_is_form", _metric_vs_form, 1e-12),
    ("onshell_identities", _onshell_identities, 1e-9),
]


# -- reduction -----------------------------------------------------------------

def _reduced_form(d, rng):
    Z = random_symplectic(d, rng)
    v = Z @ random_sp_algebra(d, rng)
    w = Z @ random_sp_algebra(d, rng)
    lhs, rhs = reduced_form_check(Z, v, w)
    return abs(lhs - rhs)


def _vertical(d, rng):
    Z = random_symplectic(d, rng)
    v = Z @ random_u_algebra(d, rng)
    w = Z @ random_sp_algebra(d, rng)
    lhs, rhs = reduced_form_check(Z, v, w)
    return max(abs(lhs), abs(rhs))


def _level_set(d, rng):
    # worst residual over fixtures that should pass; a disagreement or a
    # missed rejection reports +inf
    S = random_symplectic(d, rng)
    a, b = is_on_level_J(S), is_symplectic(S)
    if not (a.passed and b.passed):
        return np.inf
    E = rng.standard_normal(S.shape)
    bad = S + rng.uniform(1e-4, 1e-2) * E / frob(E)
    if is_on_level_J(bad).passed or is_symplectic(bad).passed:
        return np.inf
    return max(a.residual, b.residual)


def _equivariance(d, rng):
    Z = rng.standard_normal((2 * d, 2 * d))
    R = random_orthogonal(2 * d, rng)
    return frob(momentum_map(Z @ R).assemble() - R.T @ momentum_map(Z).assemble() @ R)


def _pairing(d, rng):
    Z = rng.standard_normal((2 * d, 2 * d))
    lhs, rhs = pairing_identity_check(Z, random_skew(2 * d, rng))
    return abs(lhs - rhs)


def _form_invariance(d, rng):
    Z, v, w = (rng.standard_normal((2 * d, 2 * d)) for _ in range(3))
    R = random_orthogonal(2 * d, rng)
    return max(abs(theta_eval(Z @ R, v @ R) - theta_eval(Z, v)),
               abs(omega_eval(Z @ R, v @ R, w @ R) - omega_eval(Z, v, w)))


def _tangent_sampler(d, rng):
    Z = random_symplectic(d, rng)
    return frob(momentum_differential(Z, Z @ random_sp_algebra(d, rng)))


def _differential_fd(d, rng):
    Z = random_symplectic(d, rng)
    v = Z @ random_sp_algebra(d, rng)
    a, b = projection_differential(Z, v), projection_differential_fd(Z, v)
    return frob(a.dC - b.dC)


def _horizontal_lift(d, rng):
    X = random_siegel_point(d, rng)
    u = SiegelTangent(random_symmetric(d, rng), random_symmetric(d, rng))
    t = projection_differential(section(X), horizontal_lift(X, u))
    return frob(t.dC - u.dC)


REDUCTION = [
    ("reduced_symplectic_form", _reduced_form, 1e-9),
    ("vertical_vectors_vanish", _vertical, 1e-11),
    ("level_set_is_symplectic_group", _level_set, 1e-9),
    ("momentum_map_equivariance", _equivariance, 1e-12),
    ("pairing_identity", _pairing, 1e-10),
    ("canonical_forms_invariant", _form_invariance, 1e-12),
    ("tangent_sampler_exact", _tangent_sampler, 1e-10),
    ("projection_differential_vs_fd", _differential_fd, 1e-6),
    ("horizontal_lift_projects", _horizontal_lift, 1e-10),
]


# -- dynamics ------------------------------------------------------------------

def _potential(d, rng, kind):
    if kind == "quadratic":
        return quadratic(random_spd(d, rng), rng.standard_normal(d), rng.standard_normal())
    if d == 1 and kind == "quartic":
        return quartic_1d(1.0, 0.1)
    return radial_anharmonic(d, 1.0, 0.1)


def _state(d, rng, scale=1.0):
    qp = random_on_shell_qp(d, rng)
    return HagedornState(scale * rng.standard_normal(d), scale * rng.standard_normal(d),
                         qp.Q, qp.P, rng.standard_normal())


def _params(rng, corrected):
    return SimParams(m=rng.uniform(0.5, 2.0), hbar=rng.uniform(0.1, 1.0), corrected=corrected)


def _commutes(d, rng):
    V = _potential(d, rng, "quartic")
    worst = 0.0
    for corrected in (False, True):
        s = _state(d, rng, 0.5)
        prm = _params(rng, corrected)
        down = project_rates(s, hagedorn_rhs(s, V, prm), prm)
        red = heller_rhs(project_state(s, prm), V, prm)
        worst = max(worst, float(np.max(np.abs(down.pack() - red.pack()))))
    return worst


def _hamiltonian_identity(d, rng):
    worst = 0.0
    for kind in ("quadratic", "quartic"):
        V = _potential(d, rng, kind)
        s = _state(d, rng, 0.5)
        prm = _params(rng, True)
        worst = max(worst, abs(hamiltonian("extended", s, V, prm)
                               - hamiltonian("reduced_extended", project_state(s, prm), V, prm)))
    return worst


def _angular_projection(d, rng):
    s = _state(d, rng)
    prm = _params(rng, False)
    return frob(angular_momentum(s, prm) - reduced_angular_momentum(project_state(s, prm), prm))


def _angular_equivariance(d, rng):
    s = _state(d, rng)
    prm = _params(rng, False)
    R = random_rotation(d, rng)
    return frob(angular_momentum(rotate_hagedorn(R, s), prm) - R @ angular_momentum(s, prm) @ R.T)


def _rotation_invariance(d, rng):
    V = radial_anharmonic(d, 1.0, 0.1)
    s = _state(d, rng, 0.5)
    prm = _params(rng, True)
    R = random_rotation(d, rng)
    r = project_state(s, prm)
    E0 = hamiltonian("extended", s, V, prm)
    E1 = hamiltonian("extended", rotate_hagedorn(R, s), V, prm)
    F0 = hamiltonian("reduced_extended", r, V, prm)
    F1 = hamiltonian("reduced_extended", rotate_heller(R, r), V, prm)
    return max(abs(E1 - E0), abs(F1 - F0)) / max(1.0, abs(E0))


def _vector_field(d, rng):
    V = _potential(d, rng, "quartic")
    s = _state(d, rng, 0.5)
    prm = _params(rng, True)
    a, b = hagedorn_rhs(s, V, prm).pack()[:-1], hamiltonian_vector_field(s, V, prm).pack()[:-1]
    r = project_state(s, prm)
    c, e = heller_rhs(r, V, prm).pack()[:-1], hamiltonian_vector_field(r, V, prm).pack()[:-1]
    return max(float(np.max(np.abs(a - b))), float(np.max(np.abs(c - e))))


def _energy_rate(d, rng):
    V = _potential(d, rng, "quartic")
    s = _state(d, rng, 0.5)
    prm = _params(rng, True)
    r = project_state(s, prm)
    return max(abs(hamiltonian_time_derivative(s, hagedorn_rhs(s, V, prm), V, prm)),
               abs(hamiltonian_time_derivative(r, heller_rhs(r, V, prm), V, prm)))


def _noether(d, rng):
    V = _potential(d, rng, "quartic")
    s = _state(d, rng, 0.5)
    prm = _params(rng, bool(rng.integers(2)))
    rt = hagedorn_rhs(s, V, prm)
    Zdot = from_blocks(rt.Q.real, rt.Q.imag, rt.P.real, rt.P.imag)
    return frob(momentum_differential(s.Z, Zdot))


def _riccati_split(d, rng):
    V = _potential(d, rng, "quartic")
    s = project_state(_state(d, rng, 0.5), _params(rng, False))
    prm = _params(rng, False)
    rt = heller_rhs(s, V, prm)
    C = riccati_rhs(s.X.C, V.hessian(s.q), prm.m)
    return max(frob(rt.A - C.real), frob(rt.B - C.imag))


def _corrected_quadratic(d, rng):
    V = _potential(d, rng, "quadratic")
    s = _state(d, rng)
    prm = _params(rng, False)
    a = hagedorn_rhs(s, V, prm).pack()
    b = hagedorn_rhs(s, V, SimParams(prm.m, prm.hbar, True)).pack()
    return float(np.max(np.abs(a - b)))


DYNAMICS = [
    ("projection_commutes_with_flow", _commutes, 1e-10),
    ("hamiltonian_reduction_identity", _hamiltonian_identity, 1e-10),
    ("angular_momentum_projects", _angular_projection, 1e-10),
    ("angular_momentum_equivariance", _angular_equivariance, 1e-12),
    ("hamiltonian_rotation_invariance", _rotation_invariance, 1e-12),
    ("hamiltonian_vector_field", _vector_field, 1e-6),
    ("energy_rate_vanishes", _energy_rate, 1e-10),
    ("momentum_map_rate_vanishes", _noether, 1e-10),
    ("riccati_split_matches_heller", _riccati_split, 1e-14),
    ("corrected_flag_inert_for_quadratic", _corrected_quadratic, 0.0),
]

BATTERIES = {"geometry": GEOMETRY, "reduction": REDUCTION, "dynamics": DYNAMICS}


def run_suite(suite: str, seed: int = 0, samples: int = 100, dims=(1, 2, 3)) -> CheckReport:
    """Run one battery (or ``"all"``) and collect worst-case residuals.

    Every (check, d) pair gets its own generator seeded from ``seed``, so
    results do not depend on which suites run alongside.
    """
    names = SUITES if suite == "all" else (suite,)
    for n in names:
        if n not in BATTERIES:
            raise ValueError(f"unknown suite {suite!r}; choose from {SUITES + ('all',)}")
    report = CheckReport(seed, samples)
    if samples <= 0:
        return report
    for n in names:
        for i, (name, fn, tol) in enumerate(BATTERIES[n]):
            for d in dims:
                rng = np.random.default_rng([seed, SUITES.index(n), i, d])
                worst = 0.0
                for _ in range(samples):
                    worst = max(worst, float(fn(d, rng)))
                report.results.append(CheckResult(n, name, d, samples, worst, tol))
    return report
