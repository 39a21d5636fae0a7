import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from siegelwp.errors import NonSymmetric, NotPositiveDefinite
from siegelwp.matlin import (frob, spd_power, spd_power_derivative, sym_eig, sym_tol, symmetrize,
                             validate)
from siegelwp.sampling import random_spd, random_symmetric

from strategies import generators


class TestSymEig:
    def test_identity(self):
        lam, V = sym_eig(np.eye(2))
        np.testing.assert_array_equal(lam, [1.0, 1.0])
        np.testing.assert_allclose(V.T @ V, np.eye(2), atol=1e-15)

    def test_diagonal_sorted_descending(self):
        lam, V = sym_eig(np.diag([1.0, 4.0]))
        np.testing.assert_array_equal(lam, [4.0, 1.0])
        np.testing.assert_allclose(np.abs(V), [[0.0, 1.0], [1.0, 0.0]], atol=1e-15)

    def test_two_by_two_closed_form(self):
        lam, V = sym_eig(np.array([[2.0, 1.0], [1.0, 2.0]]))
        np.testing.assert_allclose(lam, [3.0, 1.0], atol=1e-14)
        s = 1 / np.sqrt(2)
        np.testing.assert_allclose(np.abs(V), [[s, s], [s, s]], atol=1e-14)
        assert V[0, 0] * V[1, 0] > 0 and V[0, 1] * V[1, 1] < 0

    def test_rejects_asymmetric(self):
        with pytest.raises(NonSymmetric):
            sym_eig(np.array([[1.0, 2.0], [0.0, 1.0]]))

    @given(generators(), st.integers(1, 16))
    def test_reconstruction_and_orthogonality(self, rng, d):
        S = random_symmetric(d, rng, scale=rng.uniform(0.1, 10))
        lam, V = sym_eig(S)
        assert frob(V.T @ V - np.eye(d)) <= 1e-12
        assert frob(V @ np.diag(lam) @ V.T - S) <= 1e-11 * frob(S)


class TestSpdPower:
    def test_identity_half(self):
        np.testing.assert_array_equal(spd_power(np.eye(3), 0.5), np.eye(3))

    def test_diagonal_half(self):
        np.testing.assert_allclose(spd_power(np.diag([4.0, 9.0]), 0.5), np.diag([2.0, 3.0]), atol=1e-15)

    def test_scalar_inverse(self):
        np.testing.assert_allclose(spd_power(np.diag([4.0]), -1), [[0.25]], atol=1e-16)

    def test_rejects_indefinite(self):
        with pytest.raises(NotPositiveDefinite):
            spd_power(np.diag([1.0, -1e-3]), 0.5)

    def test_rejects_below_floor(self):
        with pytest.raises(NotPositiveDefinite):
            spd_power(np.diag([1.0, 1e-13]), -0.5)

    @given(generators(), st.integers(1, 8))
    def test_square_root_squares_back(self, rng, d):
        B = random_spd(d, rng, eps=rng.uniform(0.01, 1.0))
        R = spd_power(B, 0.5)
        assert frob(R @ R - B) <= 1e-10
        assert frob(spd_power(B, -0.5) - np.linalg.inv(R)) <= 1e-10

    @given(generators(), st.integers(1, 4), st.sampled_from([0.5, -0.5, -1.0]))
    def test_derivative_matches_central_difference(self, rng, d, k):
        B = random_spd(d, rng, eps=0.5)
        E = random_symmetric(d, rng)
        h = 1e-6
        fd = (spd_power(B + h * E, k) - spd_power(B - h * E, k)) / (2 * h)
        assert frob(spd_power_derivative(B, k, E) - fd) <= 1e-7 * max(1.0, frob(fd))

    def test_derivative_repeated_eigenvalue(self):
        E = np.array([[0.0, 1.0], [1.0, 0.0]])
        # at B = I the derivative of B^k is k E
        np.testing.assert_allclose(spd_power_derivative(np.eye(2), 0.5, E), 0.5 * E, atol=1e-15)


class TestValidate:
    def test_identity_orthogonal(self):
        assert validate(np.eye(3), "orthogonal") == (True, 0.0)

    def test_rotation_generator_skew(self):
        assert validate(np.array([[0.0, 1.0], [-1.0, 0.0]]), "skew") == (True, 0.0)

    def test_asymmetric_reports_frobenius_residual(self):
        diag = validate(np.array([[1.0, 2.0], [0.0, 1.0]]), "symmetric")
        assert not diag.passed
        assert diag.residual == pytest.approx(2 * np.sqrt(2), abs=1e-15)

    def test_spd_margin(self):
        diag = validate(np.diag([3.0, 0.5]), "spd")
        assert diag.passed and diag.residual == pytest.approx(0.5)
        assert not validate(np.diag([1.0, -2.0]), "spd")

    def test_never_raises_on_garbage(self):
        assert not validate(np.array([[1.0, 5.0], [-5.0, 1.0]]), "symmetric")

    def test_unknown_kind(self):
        with pytest.raises(ValueError):
            validate(np.eye(2), "hermitian")


def test_symmetrize_projects_small_asymmetry():
    S = np.array([[1.0, 2.0 + 1e-12], [2.0, 1.0]])
    out = symmetrize(S)
    np.testing.assert_array_equal(out, out.T)
    assert sym_tol(S) == pytest.approx(1e-9 * frob(S))
