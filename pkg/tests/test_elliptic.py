"""Special-function tests: series oracles, quasi-periodicity, dual routes,
modular transformation laws."""

import cmath
import math
from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from g2sew import (
    InvalidArgumentError,
    PoleError,
    RangeOverflowError,
    SeriesTolerance,
    ToleranceError,
    bernoulli,
    c_coeff,
    d_coeff,
    dedekind_eta,
    eisenstein,
    lattice_min,
    prime_form,
    weierstrass_p,
)
from g2sew.lattice import TWO_PI_I, gauss_reduce, lattice_basis, reduce_mod_lattice

S = ((0, -1), (1, 0))
T = ((1, 1), (0, 1))


def mobius(g, tau):
    (a, b), (c, d) = g
    return (a * tau + b) / (c * tau + d)


class TestBernoulli:
    def test_first_values(self):
        assert bernoulli(2) == Fraction(1, 6)
        assert bernoulli(4) == Fraction(-1, 30)
        assert bernoulli(6) == Fraction(1, 42)

    def test_generating_series_coefficients(self):
        # t/(e^t-1) - 1 + t/2 = t^2/12 - t^4/720 + t^6/30240 + ...
        assert bernoulli(2) / math.factorial(2) == Fraction(1, 12)
        assert bernoulli(4) / math.factorial(4) == Fraction(-1, 720)
        assert bernoulli(6) / math.factorial(6) == Fraction(1, 30240)

    def test_odd_or_small_rejected(self):
        for k in (0, 1, 3, 7):
            with pytest.raises(InvalidArgumentError):
                bernoulli(k)


def eisenstein_oracle(k, tau, nterms=200):
    """Direct q-series summation, independent of the adaptive implementation."""
    q = cmath.exp(TWO_PI_I * tau)
    total = complex(Fraction(-bernoulli(k), math.factorial(k)))
    for n in range(1, nterms):
        sig = sum(d ** (k - 1) for d in range(1, n + 1) if n % d == 0)
        total += 2.0 / math.factorial(k - 1) * sig * q**n
    return total


class TestEisenstein:
    def test_odd_weight_vanishes(self):
        assert eisenstein(3, 1j) == 0
        assert eisenstein(5, 0.3 + 0.9j) == 0

    def test_large_im_tau_constant_term(self):
        assert abs(eisenstein(4, 60j) - 1.0 / 720.0) < 1e-15

    def test_e2_at_i(self):
        # frozen from the direct summation oracle; equals -1/(4*pi)
        assert abs(eisenstein(2, 1j) - (-0.07957747154594767)) < 1e-13
        assert abs(eisenstein(2, 1j) - eisenstein_oracle(2, 1j)) < 1e-14

    @pytest.mark.parametrize("k", [2, 4, 6, 8, 12])
    @pytest.mark.parametrize("tau", [1j, 0.25 + 0.8j, -0.4 + 1.7j])
    def test_matches_direct_summation(self, k, tau):
        assert abs(eisenstein(k, tau) - eisenstein_oracle(k, tau)) < 1e-13

    def test_modularity_weight_4_and_6(self):
        for tau in (0.2 + 1.1j, -0.37 + 0.74j):
            for g in (S, T):
                (_, _), (c, d) = g
                j = c * tau + d
                for k in (4, 6):
                    lhs = eisenstein(k, mobius(g, tau))
                    assert abs(lhs - j**k * eisenstein(k, tau)) < 1e-10

    def test_e2_exceptional_law(self):
        for tau in (0.2 + 1.1j, -0.37 + 0.74j, 1j):
            for g in (S, T):
                (_, _), (c, d) = g
                j = c * tau + d
                lhs = eisenstein(2, mobius(g, tau))
                rhs = j**2 * eisenstein(2, tau) - c * j / TWO_PI_I
                assert abs(lhs - rhs) < 1e-10

    def test_tolerance_error_carries_bound(self):
        with pytest.raises(ToleranceError) as exc:
            eisenstein(4, 0.02j, SeriesTolerance(abs_tol=1e-14, max_terms=3))
        assert exc.value.achieved is not None

    def test_bad_tau_rejected(self):
        with pytest.raises(InvalidArgumentError):
            eisenstein(4, 1.0 - 2.0j)


class TestLattice:
    def test_min_square_lattice(self):
        assert abs(lattice_min(1j) - 2 * math.pi) < 1e-12

    def test_min_tall_lattice(self):
        # shortest vector is 2*pi*i itself
        assert abs(lattice_min(2j) - 2 * math.pi) < 1e-12

    def test_scaling_law_under_modular_action(self):
        for tau in (0.3 + 0.8j, 1j, -0.45 + 1.3j):
            for g in (S, T):
                (_, _), (c, d) = g
                lhs = lattice_min(mobius(g, tau))
                assert abs(lhs - lattice_min(tau) / abs(c * tau + d)) < 1e-10

    def test_gauss_reduction_shortest(self):
        v1, v2 = gauss_reduce(*lattice_basis(0.49 + 0.02j))
        assert abs(v1) <= abs(v2)
        assert abs(v2) <= min(abs(v2 + v1), abs(v2 - v1)) + 1e-12

    def test_reduce_mod_lattice_roundtrip(self):
        tau = 0.3 + 1.2j
        z = 7.3 - 11.2j
        z_red, m, n = reduce_mod_lattice(tau, z)
        assert abs(z - (z_red + TWO_PI_I * (m * tau + n))) < 1e-10


class TestWeierstrass:
    def test_p1_quasi_periods(self):
        tau, z = 1j, 0.4 + 0.3j
        p1 = weierstrass_p(1, tau, z)
        assert abs(weierstrass_p(1, tau, z + 2j * math.pi) - p1) < 1e-10
        assert abs(weierstrass_p(1, tau, z + TWO_PI_I * tau) - (p1 - 1)) < 1e-10

    @settings(max_examples=25, deadline=None)
    @given(st.floats(-0.45, 0.45), st.floats(0.05, 0.45),
           st.floats(-0.4, 0.4), st.floats(0.6, 1.6))
    def test_p1_quasi_periods_random(self, a, b, re_tau, im_tau):
        tau = complex(re_tau, im_tau)
        z = TWO_PI_I * (a * tau + b)
        if abs(z) < 1e-3 or min(abs(a), abs(b)) < 0.02:
            return
        p1 = weierstrass_p(1, tau, z)
        assert abs(weierstrass_p(1, tau, z + 2j * math.pi) - p1) < 1e-10
        assert abs(weierstrass_p(1, tau, z + TWO_PI_I * tau) - (p1 - 1)) < 1e-10

    def test_p2_small_z_laurent_data(self):
        # P_2 - 1/z^2 -> sum (k-1) E_k z^(k-2): check the partial sums as z -> 0
        tau = 0.2 + 1.0j
        for z in (0.01, 0.005 + 0.007j):
            lhs = weierstrass_p(2, tau, z) - 1.0 / (z * z)
            rhs = sum((k - 1) * eisenstein(k, tau) * z ** (k - 2)
                      for k in range(2, 12, 2))
            assert abs(lhs - rhs) < 1e-9

    def test_derivative_chain_finite_difference(self):
        # P_(k+1) = -(1/k) dP_k/dz, central differences
        tau, z = 1j, 1.0 + 0.0j
        h = 1e-5
        for k in range(1, 7):
            fd = (weierstrass_p(k, tau, z + h) - weierstrass_p(k, tau, z - h)) / (2 * h)
            target = weierstrass_p(k + 1, tau, z)
            assert abs(-fd / k - target) < 1e-6 * max(1.0, abs(target))

    def test_p3_at_i_finite_difference_oracle(self):
        tau, z = 1j, 1.0
        h = 2e-5
        fd = (weierstrass_p(2, tau, z + h) - weierstrass_p(2, tau, z - h)) / (2 * h)
        assert abs(weierstrass_p(3, tau, z) - (-0.5 * fd)) < 1e-8

    def test_expansion_consistency_remainder_scaling(self):
        # P_(k+1) - 1/z^(k+1) - (1/k) sum_(l<=L) C(k,l) z^(l-1) = O(z^L):
        # the first omitted term is l = L+1 carrying z^L
        tau, k, L = 0.2 + 1.0j, 2, 5
        def remainder(z):
            head = weierstrass_p(k + 1, tau, z) - z ** (-(k + 1))
            series = sum(c_coeff(k, l, tau) / k * z ** (l - 1)
                         for l in range(1, L + 1))
            return abs(head - series)
        r1, r2 = remainder(0.4), remainder(0.2)
        assert r1 / r2 == pytest.approx(2 ** L, rel=0.35)

    def test_pole_error_on_lattice(self):
        with pytest.raises(PoleError):
            weierstrass_p(2, 1j, 0)
        with pytest.raises(PoleError):
            weierstrass_p(4, 1j, TWO_PI_I * (1j + 1))

    def test_dual_route_agreement(self):
        # nearest-point representative is small (Laurent); shifting by a
        # lattice vector forces the exponential-coordinate route
        tau = 0.13 + 0.9j
        for k in (2, 3, 4, 5):
            for z in (0.4 + 0.2j, 1.1 - 0.8j):
                a = weierstrass_p(k, tau, z)
                b = weierstrass_p(k, tau, z + TWO_PI_I * (2 * tau + 1))
                assert abs(a - b) < 1e-11 * max(1.0, abs(a))


class TestPrimeForm:
    def test_zero_at_origin_and_lattice(self):
        assert prime_form(1j, 0) == 0
        assert prime_form(1j, TWO_PI_I) == 0

    def test_k_over_z_to_one(self):
        for z in (1e-3, 1e-3j, 7e-4 + 5e-4j):
            assert abs(prime_form(1j, z) / z - 1.0) < 1e-5

    def test_odd(self):
        for tau, z in ((1j, 0.7 + 0.2j), (0.3 + 1.4j, 2.5 - 1.0j)):
            assert abs(prime_form(tau, -z) + prime_form(tau, z)) < 1e-12

    def test_quasi_period_2pi_i(self):
        tau, z = 1j, 0.6 + 0.4j
        lhs = prime_form(tau, z + 2j * math.pi)
        assert abs(lhs + prime_form(tau, z)) < 1e-12

    def test_quasi_period_2pi_i_tau(self):
        tau, z = 0.2 + 1.1j, 0.5 - 0.3j
        q_z = cmath.exp(z)
        q_half = cmath.exp(1j * math.pi * tau)
        lhs = prime_form(tau, z + TWO_PI_I * tau)
        rhs = -prime_form(tau, z) / (q_z * q_half)
        assert abs(lhs - rhs) < 1e-12

    def test_route_consistency(self):
        for tau in (1j, 0.3 + 0.8j):
            dmin = lattice_min(tau)
            for frac in (0.1, 0.25, 0.39):
                z = frac * dmin * cmath.exp(0.7j)
                a = prime_form(tau, z, route="series")
                b = prime_form(tau, z, route="theta")
                assert abs(a - b) < 1e-10

    def test_series_route_radius_guard(self):
        with pytest.raises(InvalidArgumentError):
            prime_form(1j, 10.0, route="series")


class TestEta:
    def test_value_at_i(self):
        # Gamma(1/4) / (2 pi^(3/4)), and the direct truncated-product oracle
        closed = math.gamma(0.25) / (2.0 * math.pi ** 0.75)
        assert abs(dedekind_eta(1j) - closed) < 1e-12
        q = cmath.exp(-2 * math.pi)
        prod = cmath.exp(-2 * math.pi / 24)
        for n in range(1, 60):
            prod *= 1 - q**n
        assert abs(dedekind_eta(1j) - prod) < 1e-13

    def test_leading_factor_large_im(self):
        tau = 40j
        assert abs(dedekind_eta(tau) - cmath.exp(TWO_PI_I * tau / 24)) < 1e-14

    def test_conjugation_symmetry(self):
        # |eta| at +-Re tau agree (real q-product structure)
        for re in (0.3, 0.17):
            a = dedekind_eta(complex(re, 1.1))
            b = dedekind_eta(complex(-re, 1.1))
            assert abs(abs(a) - abs(b)) < 1e-13


class TestMomentCoefficients:
    def test_c_11_is_e2(self):
        tau = 0.3 + 0.9j
        assert abs(c_coeff(1, 1, tau) - eisenstein(2, tau)) < 1e-14

    def test_c_12_vanishes(self):
        assert c_coeff(1, 2, 1j) == 0

    @settings(max_examples=30, deadline=None)
    @given(st.integers(1, 10), st.integers(1, 10))
    def test_c_symmetric(self, k, l):
        tau = 0.1 + 1.0j
        assert abs(c_coeff(k, l, tau) - c_coeff(l, k, tau)) < 1e-12

    def test_d_11_is_p2(self):
        tau, z = 1j, 0.7 + 0.1j
        assert abs(d_coeff(1, 1, tau, z) - weierstrass_p(2, tau, z)) < 1e-13

    def test_d_21_is_minus_two_p3(self):
        tau, z = 1j, 0.7 + 0.1j
        assert abs(d_coeff(2, 1, tau, z) + 2 * weierstrass_p(3, tau, z)) < 1e-13

    @settings(max_examples=30, deadline=None)
    @given(st.integers(1, 8), st.integers(1, 8))
    def test_d_graded_antisymmetric(self, k, l):
        tau, z = 0.2 + 1.1j, 0.5 + 0.4j
        lhs = d_coeff(k, l, tau, z)
        rhs = (-1) ** (k + l) * d_coeff(l, k, tau, z)
        assert abs(lhs - rhs) < 1e-11 * max(1.0, abs(lhs))

    def test_factorial_range_error(self):
        with pytest.raises(RangeOverflowError):
            c_coeff(600, 600, 1j)
