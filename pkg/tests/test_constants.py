import math

import numpy as np
import pytest
from hypothesis import given, strategies as st
from scipy import special

from crofton.constants import (
    alpha_const,
    b_coeff,
    ball_intrinsic_volume,
    c0_const,
    crofton_const,
    d_const,
    kappa,
    omega,
)
from crofton.exceptions import DomainError

PI = math.pi


def kappa_recurrence(n):
    """Oracle: kappa_0 = 1, kappa_1 = 2, kappa_n = 2 pi / n * kappa_{n-2}."""
    vals = [1.0, 2.0]
    for m in range(2, n + 1):
        vals.append(2 * PI / m * vals[m - 2])
    return vals[n]


def omega_oracle(n):
    return 2 * PI ** (n / 2) / special.gamma(n / 2)


def b_oracle(n, q):
    num = np.prod([omega_oracle(i) for i in range(n - q + 1, n + 1)])
    den = np.prod([omega_oracle(i) for i in range(1, q + 1)])
    return num / den


def alpha_oracle(n, k, q, r):
    # direct transcription of the two products
    top = np.prod([omega_oracle(i) for i in range(k - q - r, k - q + 1)])
    bot = np.prod([omega_oracle(i) for i in range(n - q - r, n - q + 1)])
    tail = np.prod([omega_oracle(n - i) / omega_oracle(k - i) for i in range(r)]) if r else 1.0
    return top / bot * tail


def crofton_oracle(s1, s2, r1, r2):
    f = lambda m: math.factorial(m) * kappa_recurrence(m)
    return f(r1) / f(s1) * f(r2) / f(s2)


class TestKappaOmega:
    @pytest.mark.parametrize("n,expected", [(0, 1.0), (1, 2.0), (2, PI), (3, 4 * PI / 3)])
    def test_kappa_values(self, n, expected):
        assert kappa(n) == pytest.approx(expected, rel=1e-15)

    @pytest.mark.parametrize("n,expected", [(1, 2.0), (2, 2 * PI), (3, 4 * PI), (4, 2 * PI ** 2)])
    def test_omega_values(self, n, expected):
        assert omega(n) == pytest.approx(expected, rel=1e-15)

    def test_omega_zero_raises(self):
        with pytest.raises(DomainError, match="omega\\(0\\) undefined by convention"):
            omega(0)

    @pytest.mark.parametrize("n", range(0, 40))
    def test_kappa_matches_recurrence(self, n):
        assert kappa(n) == pytest.approx(kappa_recurrence(n), rel=1e-13)

    @pytest.mark.parametrize("n", range(1, 26))
    def test_omega_is_n_kappa_to_4_ulp(self, n):
        assert abs(omega(n) - n * kappa(n)) <= 4 * np.spacing(omega(n))

    @pytest.mark.parametrize("bad", [-1, 65, 2.5, True])
    def test_index_validation(self, bad):
        with pytest.raises(DomainError):
            kappa(bad)


class TestBCoeff:
    def test_examples(self):
        assert b_coeff(3, 1) == pytest.approx(2 * PI)
        assert b_coeff(4, 2) == pytest.approx(2 * PI ** 2)
        assert b_coeff(7, 0) == 1.0

    def test_q_above_n_raises(self):
        with pytest.raises(DomainError):
            b_coeff(2, 3)

    @given(st.integers(1, 12), st.data())
    def test_matches_product_oracle(self, n, data):
        q = data.draw(st.integers(0, n))
        assert b_coeff(n, q) == pytest.approx(b_oracle(n, q), rel=1e-12)

    @given(st.integers(2, 12), st.data())
    def test_shift_identity(self, n, data):
        # b_{a,q} = omega_{q+1} / omega_{a-q} * b_{a,q+1} for q + 1 <= a
        q = data.draw(st.integers(0, n - 1))
        assert b_coeff(n, q) == pytest.approx(omega(q + 1) / omega(n - q) * b_coeff(n, q + 1), rel=1e-12)


class TestCrofton:
    def test_examples(self):
        assert crofton_const(3, 0, 0, 3) == pytest.approx(1.0)
        assert crofton_const(2, 1, 1, 3) == pytest.approx(4.0)

    @given(st.integers(0, 20), st.integers(0, 20))
    def test_identity_indices(self, a, b):
        assert crofton_const(a, b, a, b) == pytest.approx(1.0, rel=1e-14)

    @given(st.integers(0, 15), st.integers(0, 15), st.integers(0, 15), st.integers(0, 15))
    def test_matches_oracle(self, s1, s2, r1, r2):
        assert crofton_const(s1, s2, r1, r2) == pytest.approx(crofton_oracle(s1, s2, r1, r2), rel=1e-12)


class TestAlpha:
    def test_examples(self):
        assert alpha_const(3, 2, 0, 1) == pytest.approx(1 / PI, rel=1e-14)
        assert alpha_const(4, 3, 1, 1) == pytest.approx(0.25, rel=1e-14)

    def test_boundary_needs_omega_zero(self):
        with pytest.raises(DomainError):
            alpha_const(4, 3, 2, 1)

    @pytest.mark.parametrize("n", range(3, 11))
    def test_r0_reduction(self, n):
        for k in range(1, n + 1):
            for q in range(0, k):
                assert alpha_const(n, k, q, 0) == pytest.approx(omega(k - q) / omega(n - q), rel=1e-12)

    @pytest.mark.parametrize("n", range(3, 11))
    def test_matches_product_oracle(self, n):
        for k in range(1, n + 1):
            for r in range(0, k):
                for q in range(0, k - r):
                    assert alpha_const(n, k, q, r) == pytest.approx(alpha_oracle(n, k, q, r), rel=1e-12)

    @pytest.mark.parametrize("n", range(3, 11))
    def test_affine_reduction(self, n):
        for k in range(1, n + 1):
            for r in range(0, k):
                for q in range(0, k - r):
                    lhs = b_coeff(k - r, q) / b_coeff(n - r, q) * b_coeff(n, q) / b_coeff(k, q)
                    rhs = alpha_const(n, k, q, r) * omega(n - r - q) / omega(k - r - q)
                    assert lhs == pytest.approx(rhs, rel=1e-12)

    def test_full_space_is_one(self):
        for n in range(3, 9):
            for r in range(0, n):
                for q in range(0, n - r):
                    assert alpha_const(n, n, q, r) == pytest.approx(1.0, rel=1e-13)


class TestC0AndD:
    def test_c0_examples(self):
        assert c0_const(3, 2, 0, 1, 0) == pytest.approx(PI, rel=1e-14)
        assert c0_const(4, 3, 1, 1, 1) == pytest.approx(3 * PI, rel=1e-14)
        # r = 0 and q = j = 0: omega_n / omega_k
        assert c0_const(5, 3, 0, 0, 0) == pytest.approx(omega(5) / omega(3), rel=1e-14)

    def test_c0_matches_volume_prefactor(self):
        # for j = q = 0 the measurement reduces to omega_{n-r} / omega_{k-r} times a weighted volume
        for n in range(3, 8):
            for k in range(2, n + 1):
                for r in range(0, k):
                    assert c0_const(n, k, 0, r, 0) == pytest.approx(omega(n - r) / omega(k - r), rel=1e-12)

    def test_d_examples(self):
        assert d_const(3, 2, 1, 0, 0) == pytest.approx(1.0)
        expected = (b_oracle(2, 1) / b_oracle(1, 1)) * (b_oracle(2, 1) / b_oracle(3, 1)) * crofton_oracle(2, 1, 0, 3)
        assert d_const(3, 2, 1, 1, 1) == pytest.approx(expected, rel=1e-12)
        assert d_const(3, 2, 1, 1, 1) == pytest.approx(PI, rel=1e-12)

    @pytest.mark.parametrize("n", range(3, 11))
    def test_d_classical_reduction(self, n):
        for k in range(1, n + 1):
            for j in range(0, k + 1):
                assert d_const(n, k, 0, j, k) == pytest.approx(crofton_const(n - j, k, k - j, n), rel=1e-12)

    @pytest.mark.parametrize("n", range(3, 10))
    def test_d_equals_c0_times_ratio_below_top(self, n):
        for k in range(2, n + 1):
            for r in range(0, k):
                for q in range(0, k - r):
                    for j in range(0, q + 1):
                        expected = c0_const(n, k, q, r, j) * omega(k - r - q) / omega(n - r - q)
                        assert d_const(n, k, r, j, q) == pytest.approx(expected, rel=1e-12)

    def test_d_at_top_never_touches_omega_zero(self):
        # q = k - r is admissible in the vertical design
        value = d_const(4, 3, 1, 0, 2)
        assert math.isfinite(value) and value > 0

    @pytest.mark.parametrize("args", [(3, 2, 1, 2, 1), (3, 2, 1, 0, 2), (3, 4, 1, 0, 0)])
    def test_d_index_errors(self, args):
        with pytest.raises(DomainError):
            d_const(*args)


@given(st.integers(3, 10), st.data())
def test_constants_positive_and_finite(n, data):
    k = data.draw(st.integers(1, n))
    r = data.draw(st.integers(0, k - 1))
    q = data.draw(st.integers(0, k - r - 1))
    j = data.draw(st.integers(0, q))
    for v in (alpha_const(n, k, q, r), c0_const(n, k, q, r, j), d_const(n, k, r, j, q)):
        assert math.isfinite(v) and v > 0


@pytest.mark.parametrize("d,m,expected", [
    (3, 3, 4 * PI / 3), (3, 2, 2 * PI), (3, 1, 4.0), (3, 0, 1.0), (4, 3, PI ** 2), (2, 1, PI), (2, 3, 0.0)])
def test_ball_intrinsic_volumes(d, m, expected):
    assert ball_intrinsic_volume(d, m) == pytest.approx(expected, rel=1e-14)


def test_ball_intrinsic_volume_homogeneity():
    assert ball_intrinsic_volume(4, 2, 3.0) == pytest.approx(9 * ball_intrinsic_volume(4, 2), rel=1e-14)
