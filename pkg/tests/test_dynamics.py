import numpy as np
import pytest
from hypothesis import given, settings

from siegelwp.dynamics import (BranchTracker, HagedornState, HellerState, SimParams, angular_momentum,
                               diamond, hagedorn_rhs, hamiltonian, hamiltonian_time_derivative,
                               hamiltonian_vector_field, heller_rhs, lift_state, project_rates,
                               project_state, reduced_angular_momentum, resymplectify, rotate_hagedorn,
                               rotate_heller)
from siegelwp.errors import OffShell, ShapeMismatch, SingularQ, StepGuardViolation
from siegelwp.matlin import frob
from siegelwp.potentials import free, harmonic, quartic_1d, radial_anharmonic
from siegelwp.reduction import momentum_differential
from siegelwp.sampling import random_on_shell_qp, random_rotation, random_siegel_point
from siegelwp.siegel import SiegelPoint

from strategies import dims, generators

UNIT = SimParams()


def random_hagedorn(d, rng, scale=1.0):
    qp = random_on_shell_qp(d, rng)
    return HagedornState(scale * rng.standard_normal(d), scale * rng.standard_normal(d), qp.Q, qp.P,
                         rng.standard_normal())


def random_heller(d, rng):
    return HellerState(rng.standard_normal(d), rng.standard_normal(d), random_siegel_point(d, rng),
                       rng.standard_normal())


def heller(A, B, q=0.0, p=0.0, phi=0.0):
    return HellerState.from_AB([q], [p], [[A]], [[B]], phi)


class TestStates:
    def test_shape_mismatch(self):
        with pytest.raises(ShapeMismatch):
            HagedornState([0.0, 0.0], [0.0], np.eye(2), 1j * np.eye(2))

    @given(generators(), dims)
    def test_pack_unpack_round_trip(self, rng, d):
        s = random_hagedorn(d, rng)
        t = HagedornState.unpack(s.pack(), d)
        np.testing.assert_array_equal(t.pack(), s.pack())
        h = random_heller(d, rng)
        np.testing.assert_array_equal(HellerState.unpack(h.pack(), d).pack(), h.pack())


class TestVectorFields:
    def test_hagedorn_harmonic(self):
        r = hagedorn_rhs(HagedornState.coherent([0.0], [0.0]), harmonic(), UNIT)
        assert r.q[0] == 0 and r.p[0] == 0
        assert r.Q[0, 0] == 1j and r.P[0, 0] == -1

    def test_heller_coherent_fixed_point(self):
        r = heller_rhs(heller(0.0, 1.0), harmonic(), SimParams(hbar=0.3))
        assert r.A[0, 0] == 0 and r.B[0, 0] == 0
        assert r.phi == pytest.approx(-0.15)

    def test_heller_arithmetic(self):
        r = heller_rhs(heller(1.0, 1.0), harmonic(), UNIT)
        assert r.A[0, 0] == pytest.approx(-1.0) and r.B[0, 0] == pytest.approx(-2.0)

    @pytest.mark.parametrize("B", [0.5, 1.0, 3.0])
    def test_free_spreading(self, B):
        r = heller_rhs(heller(0.0, B), free(), SimParams(m=2.0))
        assert r.A[0, 0] == pytest.approx(B * B / 2.0) and r.B[0, 0] == 0

    def test_corrected_force_quartic(self):
        V = quartic_1d(1.0, 0.1)
        s = HagedornState([0.5], [0.0], [[1.0]], [[1j]])
        plain = hagedorn_rhs(s, V, SimParams(hbar=0.2)).p[0]
        corr = hagedorn_rhs(s, V, SimParams(hbar=0.2, corrected=True)).p[0]
        # -(hbar/4) V'''(q) |Q|^2 with V''' = 24 lam q
        assert corr - plain == pytest.approx(-0.05 * 24 * 0.1 * 0.5)

    @given(generators(), dims)
    def test_corrected_flag_inert_for_quadratic(self, rng, d):
        V = harmonic(d, omega=rng.uniform(0.5, 2))
        s = random_hagedorn(d, rng)
        a = hagedorn_rhs(s, V, SimParams(hbar=0.7)).pack()
        b = hagedorn_rhs(s, V, SimParams(hbar=0.7, corrected=True)).pack()
        np.testing.assert_array_equal(a, b)

    @given(generators(), dims)
    def test_projection_commutes(self, rng, d):
        V = radial_anharmonic(d) if d > 1 else quartic_1d()
        s = random_hagedorn(d, rng, 0.5)
        prm = SimParams(hbar=0.5, corrected=False)
        pushed = project_rates(s, hagedorn_rhs(s, V, prm), prm)
        direct = heller_rhs(project_state(s, prm), V, prm)
        assert np.max(np.abs(pushed.pack() - direct.pack())) <= 1e-10 * max(1.0, np.max(np.abs(direct.pack())))

    @given(generators(), dims)
    def test_momentum_map_rate_vanishes(self, rng, d):
        s = random_hagedorn(d, rng, 0.5)
        r = hagedorn_rhs(s, quartic_1d() if d == 1 else radial_anharmonic(d), UNIT)
        v = HagedornState(s.q, s.p, r.Q, r.P).Z
        assert frob(momentum_differential(s.Z, v)) <= 1e-10 * max(1.0, frob(s.Z) * frob(v))

    @settings(max_examples=15)
    @given(generators(), dims)
    def test_rhs_is_hamiltonian_vector_field(self, rng, d):
        V = quartic_1d() if d == 1 else radial_anharmonic(d)
        prm = SimParams(hbar=0.6, corrected=True)
        s = random_hagedorn(d, rng, 0.5)
        a, b = hagedorn_rhs(s, V, prm), hamiltonian_vector_field(s, V, prm)
        assert np.max(np.abs(a.pack()[:-1] - b.pack()[:-1])) <= 1e-6
        h = random_heller(d, rng)
        a, b = heller_rhs(h, V, prm), hamiltonian_vector_field(h, V, prm)
        assert np.max(np.abs(a.pack()[:-1] - b.pack()[:-1])) <= 1e-6

    @settings(max_examples=20)
    @given(generators(), dims)
    def test_energy_rate_vanishes(self, rng, d):
        V = quartic_1d() if d == 1 else radial_anharmonic(d)
        prm = SimParams(hbar=0.5, corrected=True)
        s = random_hagedorn(d, rng, 0.5)
        assert abs(hamiltonian_time_derivative(s, hagedorn_rhs(s, V, prm), V, prm)) <= 1e-8


class TestHamiltonians:
    def test_reduced_quadratic(self):
        assert hamiltonian("reduced_quadratic", heller(0.0, 1.0), harmonic(), UNIT) == pytest.approx(1.0)

    def test_lifted_quadratic_matches_reduced(self):
        s = HagedornState.coherent([0.0], [0.0])
        assert hamiltonian("lifted_quadratic", s, harmonic(), UNIT) == pytest.approx(1.0)

    def test_reduced_extended_ground_state(self):
        assert hamiltonian("reduced_extended", heller(0.0, 1.0), harmonic(), UNIT) == pytest.approx(0.5)

    def test_wrong_state_type(self):
        with pytest.raises(ShapeMismatch):
            hamiltonian("extended", heller(0.0, 1.0), harmonic(), UNIT)
        with pytest.raises(ValueError):
            hamiltonian("total", heller(0.0, 1.0), harmonic(), UNIT)

    @given(generators(), dims)
    def test_reduction_identity(self, rng, d):
        prm = SimParams(hbar=rng.uniform(0.1, 1.0))
        s = random_hagedorn(d, rng, 0.5)
        for V in (harmonic(d), radial_anharmonic(d) if d > 1 else quartic_1d()):
            h = hamiltonian("extended", s, V, prm)
            hb = hamiltonian("reduced_extended", project_state(s, prm), V, prm)
            assert abs(h - hb) <= 1e-10 * max(1.0, abs(h))


class TestAngularMomentum:
    def test_diamond(self):
        np.testing.assert_array_equal(diamond([1.0, 0.0], [0.0, 1.0]), [[0, -1], [1, 0]])

    def test_coherent_d3(self):
        s = HagedornState.coherent([1.0, 0.0, 0.0], [0.0, 1.0, 0.0])
        J = angular_momentum(s, UNIT)
        expected = np.zeros((3, 3))
        expected[1, 0], expected[0, 1] = 1.0, -1.0
        np.testing.assert_allclose(J, expected, atol=1e-15)

    def test_reduced_with_zero_A(self):
        s = HellerState([1.0, 2.0], [0.5, -1.0], SiegelPoint(np.zeros((2, 2)), np.diag([1.0, 3.0])))
        np.testing.assert_array_equal(reduced_angular_momentum(s, UNIT), diamond(s.q, s.p))

    @given(generators(), dims)
    def test_matrix_part_is_commutator(self, rng, d):
        qp = random_on_shell_qp(d, rng)
        s = HagedornState(np.zeros(d), np.zeros(d), qp.Q, qp.P)
        prm = SimParams(hbar=0.8)
        X = project_state(s, prm).X
        Binv = np.linalg.inv(X.B)
        assert frob(angular_momentum(s, prm) + 0.4 * (Binv @ X.A - X.A @ Binv)) <= 1e-10

    @given(generators(), dims)
    def test_projects(self, rng, d):
        s = random_hagedorn(d, rng)
        assert frob(angular_momentum(s, UNIT) - reduced_angular_momentum(project_state(s, UNIT), UNIT)) <= 1e-10

    @given(generators())
    def test_rotation_equivariance_d3(self, rng):
        R = random_rotation(3, rng)
        s = random_hagedorn(3, rng)
        assert frob(angular_momentum(rotate_hagedorn(R, s), UNIT) - R @ angular_momentum(s, UNIT) @ R.T) <= 1e-12
        h = random_heller(3, rng)
        lhs = reduced_angular_momentum(rotate_heller(R, h), UNIT)
        assert frob(lhs - R @ reduced_angular_momentum(h, UNIT) @ R.T) <= 1e-12

    @given(generators())
    def test_radial_energy_invariant_under_rotation(self, rng):
        V, R = radial_anharmonic(3), random_rotation(3, rng)
        s = random_hagedorn(3, rng, 0.5)
        assert hamiltonian("extended", rotate_hagedorn(R, s), V, UNIT) == pytest.approx(
            hamiltonian("extended", s, V, UNIT), abs=1e-12)


class TestProjectState:
    def test_coherent(self):
        h = project_state(HagedornState.coherent([0.0, 0.0], [0.0, 0.0]), UNIT, 0.0)
        np.testing.assert_array_equal(h.A, 0)
        np.testing.assert_array_equal(h.B, np.eye(2))
        assert h.phi == 0.0

    def test_shear(self):
        h = project_state(HagedornState([0.0], [0.0], [[1.0]], [[2 + 1j]], 1.5), UNIT)
        assert h.X.C[0, 0] == pytest.approx(2 + 1j) and h.phi == 1.5

    @pytest.mark.parametrize("t", [0.5, 2.0, 7.0])
    def test_harmonic_phase_dictionary(self, t):
        # exact harmonic orbit: Q = e^{it}, S stays 0, tracked arg det Q = t
        s = HagedornState([0.0], [0.0], [[np.exp(1j * t)]], [[1j * np.exp(1j * t)]], 0.0)
        h = project_state(s, UNIT, argdet=t)
        # the Heller phase of the coherent state rotates at -hbar/2
        assert h.phi == pytest.approx(-t / 2)

    def test_off_shell(self):
        with pytest.raises(OffShell):
            project_state(HagedornState([0.0], [0.0], [[1.0]], [[1.0]]), UNIT)

    @given(generators(), dims)
    def test_lift_then_project(self, rng, d):
        h = random_heller(d, rng)
        s, argdet = lift_state(h, UNIT)
        back = project_state(s, UNIT, argdet)
        assert frob(back.X.C - h.X.C) <= 1e-10 and back.phi == pytest.approx(h.phi, abs=1e-12)


class TestBranchTracker:
    def test_accumulates_past_pi(self):
        tr = BranchTracker(np.eye(1) + 0j)
        for t in np.linspace(0.1, 4.0, 40):
            tr.update(np.array([[np.exp(1j * t)]]))
        assert tr.value == pytest.approx(4.0)

    def test_guard(self):
        tr = BranchTracker(np.eye(1) + 0j)
        with pytest.raises(StepGuardViolation):
            tr.update(np.array([[np.exp(2j)]]))

    def test_singular(self):
        with pytest.raises(SingularQ):
            BranchTracker(np.zeros((1, 1)))


class TestResymplectify:
    @given(generators(), dims)
    def test_repairs_drift_and_keeps_projection(self, rng, d):
        s = random_hagedorn(d, rng)
        noisy = HagedornState(s.q, s.p, s.Q * (1 + 1e-4 * rng.standard_normal((d, d))), s.P, s.S)
        fixed = resymplectify(noisy)
        assert fixed.onshell_residual() <= 1e-10
        X0 = np.linalg.solve(noisy.Q.T, noisy.P.T).T
        X1 = np.linalg.solve(fixed.Q.T, fixed.P.T).T
        assert frob(0.5 * (X0 + X0.T) - X1) <= 1e-10 * max(1.0, frob(X1))
        assert np.angle(np.linalg.det(fixed.Q) / np.linalg.det(noisy.Q)) == pytest.approx(0.0, abs=1e-12)
        assert fixed.S == noisy.S

    @given(generators(), dims)
    def test_identity_on_shell(self, rng, d):
        s = random_hagedorn(d, rng)
        fixed = resymplectify(s)
        assert frob(fixed.Q - s.Q) + frob(fixed.P - s.P) <= 1e-9 * max(1.0, frob(s.Q) + frob(s.P))
