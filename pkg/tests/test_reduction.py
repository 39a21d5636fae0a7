import numpy as np
import pytest
from hypothesis import given

from siegelwp.errors import NotOnLevelSet, NotOrthogonal, NotSkew, TangencyViolation
from siegelwp.matlin import frob
from siegelwp.reduction import (horizontal_lift, is_on_level_J, level_tangent, lie_pairing,
                                momentum_differential, momentum_map, o2d_act, omega_eval,
                                pairing_identity_check, projection, projection_differential,
                                projection_differential_fd, reduced_form_check, theta_eval)
from siegelwp.sampling import (random_orthogonal, random_siegel_point, random_skew, random_sp_algebra,
                               random_symmetric, random_symplectic, random_u_algebra)
from siegelwp.siegel import SiegelPoint, SiegelTangent, section
from siegelwp.spgroup import from_blocks, is_symplectic, standard_J

from strategies import dims, generators


def phase(Q1, Q2, P1, P2):
    return from_blocks(*(np.atleast_2d(np.asarray(x, float)) for x in (Q1, Q2, P1, P2)))


class TestForms:
    def test_theta_zero_momentum(self, rng):
        Z = phase(rng.standard_normal((2, 2)), rng.standard_normal((2, 2)), np.zeros((2, 2)), np.zeros((2, 2)))
        assert theta_eval(Z, rng.standard_normal((4, 4))) == 0.0

    def test_theta_trace(self):
        assert theta_eval(phase(0, 0, 3, 4), phase(1, 1, 0, 0)) == 7.0

    def test_theta_kills_vertical(self, rng):
        v = phase(0, 0, rng.standard_normal(), rng.standard_normal())
        assert theta_eval(rng.standard_normal((2, 2)), v) == 0.0

    def test_omega_examples(self):
        dQ1, dP1, dP2 = phase(1, 0, 0, 0), phase(0, 0, 1, 0), phase(0, 0, 0, 1)
        assert omega_eval(None, dQ1, dQ1) == 0.0
        assert omega_eval(None, dQ1, dP1) == 1.0
        assert omega_eval(None, dQ1, dP2) == 0.0


class TestO2dAction:
    def test_identity(self, rng):
        Z = rng.standard_normal((4, 4))
        np.testing.assert_array_equal(o2d_act(Z, np.eye(4)), Z)

    def test_left_identity(self, rng):
        R = random_orthogonal(4, rng)
        np.testing.assert_array_equal(o2d_act(np.eye(4), R), R)

    def test_J_on_identity(self):
        np.testing.assert_array_equal(o2d_act(np.eye(2), standard_J(1)), phase(0, 1, -1, 0))

    def test_rejects_non_orthogonal(self):
        with pytest.raises(NotOrthogonal):
            o2d_act(np.eye(2), 2 * np.eye(2))


class TestMomentumMap:
    def test_identity_gives_J(self):
        M = momentum_map(np.eye(4))
        np.testing.assert_array_equal(M.M11, 0)
        np.testing.assert_array_equal(M.M22, 0)
        np.testing.assert_array_equal(M.M12, np.eye(2))
        np.testing.assert_array_equal(M.assemble(), standard_J(2))

    def test_zero(self):
        np.testing.assert_array_equal(momentum_map(np.zeros((4, 4))).assemble(), 0)

    def test_quadratic_scaling(self):
        np.testing.assert_array_equal(momentum_map(2 * np.eye(2)).assemble(), 4 * standard_J(1))

    @given(generators(), dims)
    def test_equivariance(self, rng, d):
        Z = rng.standard_normal((2 * d, 2 * d))
        R = random_orthogonal(2 * d, rng)
        lhs = momentum_map(Z @ R).assemble()
        rhs = R.T @ momentum_map(Z).assemble() @ R
        assert frob(lhs - rhs) <= 1e-12 * max(1.0, frob(Z) ** 2)

    @given(generators(), dims)
    def test_differential_matches_central_difference(self, rng, d):
        Z, v = rng.standard_normal((2, 2 * d, 2 * d))
        h = 1e-5
        fd = (momentum_map(Z + h * v).assemble() - momentum_map(Z - h * v).assemble()) / (2 * h)
        # M is quadratic so the central difference is exact up to rounding
        assert frob(momentum_differential(Z, v) - fd) <= 1e-8


class TestPairing:
    def test_J_with_itself(self):
        for d in (1, 2, 3):
            assert lie_pairing(standard_J(d), standard_J(d)) == d

    def test_zero(self, rng):
        xi = random_skew(4, rng)
        assert lie_pairing(xi, np.zeros((4, 4))) == 0.0

    def test_rotation_generator(self):
        a = 1.7
        xi = np.array([[0.0, a], [-a, 0.0]])
        assert lie_pairing(xi, xi) == pytest.approx(a * a)

    def test_rejects_non_skew(self):
        with pytest.raises(NotSkew):
            lie_pairing(np.eye(2), standard_J(1))

    def test_identity_examples(self):
        assert pairing_identity_check(np.zeros((2, 2)), standard_J(1)) == (0.0, 0.0)
        for d in (1, 2, 3):
            lhs, rhs = pairing_identity_check(np.eye(2 * d), standard_J(d))
            assert lhs == pytest.approx(d) and rhs == pytest.approx(d)

    @given(generators(), dims)
    def test_identity_random(self, rng, d):
        Z = rng.standard_normal((2 * d, 2 * d))
        lhs, rhs = pairing_identity_check(Z, random_skew(2 * d, rng))
        assert abs(lhs - rhs) <= 1e-10 * max(1.0, abs(lhs))


class TestLevelSet:
    def test_identity(self):
        assert is_on_level_J(np.eye(4)).passed

    @pytest.mark.parametrize("d", [1, 2, 3])
    def test_scaled_identity(self, d):
        diag = is_on_level_J(2 * np.eye(2 * d))
        assert not diag.passed
        assert diag.residual == pytest.approx(3 * np.sqrt(2 * d), abs=1e-13)

    @given(generators(), dims)
    def test_agrees_with_symplectic_group(self, rng, d):
        S = random_symplectic(d, rng)
        a, b = is_on_level_J(S, 1e-9), is_symplectic(S, 1e-9)
        assert a.passed and b.passed
        bad = S + 1e-3 * rng.standard_normal(S.shape)
        assert not is_on_level_J(bad, 1e-9).passed and not is_symplectic(bad, 1e-9).passed


class TestProjection:
    def test_base_point(self):
        assert frob(projection(np.eye(4)).C - 1j * np.eye(2)) == 0

    @given(generators(), dims)
    def test_agrees_with_quotient_of_section(self, rng, d):
        X = random_siegel_point(d, rng)
        assert frob(projection(section(X)).C - X.C) <= 1e-10

    @given(generators(), dims)
    def test_differential_vs_central_difference(self, rng, d):
        Z = random_symplectic(d, rng)
        v = level_tangent(Z, random_sp_algebra(d, rng))
        a, b = projection_differential(Z, v), projection_differential_fd(Z, v)
        assert frob(a.dA - b.dA) + frob(a.dB - b.dB) <= 1e-6

    @given(generators(), dims)
    def test_horizontal_lift_projects_back(self, rng, d):
        X = random_siegel_point(d, rng)
        u = SiegelTangent(random_symmetric(d, rng), random_symmetric(d, rng))
        lift = horizontal_lift(X, u)
        Z = section(X)
        assert frob(momentum_differential(Z, lift)) <= 1e-10
        back = projection_differential(Z, lift)
        assert frob(back.dA - u.dA) + frob(back.dB - u.dB) <= 1e-10


class TestReducedForm:
    def test_unit_tangents_at_identity(self):
        Z = np.eye(2)
        X = SiegelPoint.base(1)
        v = horizontal_lift(X, SiegelTangent([[1.0]], [[0.0]]))
        w = horizontal_lift(X, SiegelTangent([[0.0]], [[1.0]]))
        lhs, rhs = reduced_form_check(Z, v, w)
        assert lhs == pytest.approx(rhs, abs=1e-9)
        # the Siegel form gives -1 here, so both sides are 1/2
        assert lhs == pytest.approx(0.5, abs=1e-12)

    def test_antisymmetry(self, rng):
        Z = random_symplectic(2, rng)
        v = level_tangent(Z, random_sp_algebra(2, rng))
        assert reduced_form_check(Z, v, v) == (0.0, 0.0)

    @given(generators(), dims)
    def test_vertical_vectors_in_kernel(self, rng, d):
        Z = random_symplectic(d, rng)
        v = level_tangent(Z, random_u_algebra(d, rng))
        w = level_tangent(Z, random_sp_algebra(d, rng))
        lhs, rhs = reduced_form_check(Z, v, w)
        assert abs(lhs) <= 1e-11 and abs(rhs) <= 1e-11

    @given(generators(), dims)
    def test_random_level_tangents(self, rng, d):
        Z = random_symplectic(d, rng)
        v, w = (level_tangent(Z, random_sp_algebra(d, rng)) for _ in range(2))
        lhs, rhs = reduced_form_check(Z, v, w)
        assert abs(lhs - rhs) <= 1e-9

    def test_off_level_rejected(self):
        with pytest.raises(NotOnLevelSet):
            reduced_form_check(2 * np.eye(2), np.eye(2), np.eye(2))

    def test_non_tangent_rejected(self):
        with pytest.raises(TangencyViolation):
            reduced_form_check(np.eye(2), np.eye(2), standard_J(1))
