"""Basis constants, potential evaluation and the direct convolution oracle."""

import math

import numpy as np
import pytest
from numpy.testing import assert_allclose
from scipy import integrate, special

from fracplasma.riesz import (
    BasisParams,
    SpectralCoefficients,
    boundary_multiplier,
    lambda_all,
    lambda_n,
    mass,
    mu_all,
    mu_n,
    oscillation,
    q_all,
    q_k,
    rho_eval,
    riesz_kernel_constant,
    u_inside,
    u_outside,
)
from fracplasma.specfun import gauss_jacobi_rule, jacobi_p, jacobi_table


def _random_coeffs(basis, rng, decay=2.0):
    n = np.arange(basis.trunc + 1, dtype=float)
    c = rng.standard_normal(basis.trunc + 1) / (1.0 + n) ** decay
    return SpectralCoefficients(c=c, a=1.0)


def test_basis_params_validation():
    with pytest.raises(ValueError):
        BasisParams(dim=0, s=0.5, trunc=4)
    with pytest.raises(ValueError):
        BasisParams(dim=2, s=0.0, trunc=4)
    with pytest.raises(ValueError):
        BasisParams(dim=2, s=1.0, trunc=4)
    with pytest.raises(ValueError):
        BasisParams(dim=1, s=0.6, trunc=4)  # dim 1 needs s < 1/2
    with pytest.raises(ValueError):
        BasisParams(dim=2, s=0.5, trunc=-1)
    basis = BasisParams(dim=3, s=0.25, trunc=8)
    assert basis.jacobi_alpha == -0.25
    assert basis.jacobi_beta == 0.5
    assert basis.critical_exponent == pytest.approx((3 + 0.5) / (3 - 0.5), rel=1e-15)


def test_spectral_coefficients_validation():
    with pytest.raises(ValueError):
        SpectralCoefficients(c=np.array([1.0, np.nan]), a=1.0)
    with pytest.raises(ValueError):
        SpectralCoefficients(c=np.array([1.0]), a=0.0)
    coeffs = SpectralCoefficients(c=np.array([2.0, 0.5, 1e-9]), a=3.0)
    assert coeffs.trunc == 2
    assert coeffs.tail_ratio == pytest.approx(0.5e-9, rel=1e-12)


def test_closed_form_anchors_dim2_half():
    basis = BasisParams(dim=2, s=0.5, trunc=4)
    lam = lambda_all(basis)
    mu = mu_all(basis)
    q = q_all(basis)
    assert_allclose(lam[0], math.pi / 2.0, rtol=1e-14)
    assert_allclose(mu[0], 2.0 / math.pi, rtol=1e-14)
    assert_allclose(q[0], 2.0 * math.sqrt(2.0), rtol=1e-14)
    assert_allclose(q[1], math.sqrt(2.0) / 2.5, rtol=1e-14)


def test_constant_tables_against_gamma_products():
    # the log-space tables must agree with naive gamma-function quotients
    rng = np.random.default_rng(3517)
    for _ in range(10):
        dim = int(rng.integers(1, 5))
        s = float(rng.uniform(0.05, 0.45 if dim == 1 else 0.95))
        basis = BasisParams(dim=dim, s=s, trunc=12)
        g = special.gamma
        half = dim / 2.0
        n = np.arange(13, dtype=float)
        lam_direct = (
            2.0 ** (-2.0 * s) * g(1.0 + n - s) * g(half - s + n) / (g(n + 1.0) * g(half + n))
        )
        mu_direct = (
            math.sin(s * math.pi) / math.pi * special.beta(1.0 + n - s, half + n)
        )
        q_direct = (
            2.0 ** (half - s)
            / (2.0 * n + half - s)
            * g(n + 1.0 - s)
            * g(n + half)
            / (g(n + 1.0) * g(n + half - s))
        )
        assert_allclose(lambda_all(basis), lam_direct, rtol=1e-12)
        assert_allclose(mu_all(basis), mu_direct, rtol=1e-12)
        assert_allclose(q_all(basis), q_direct, rtol=1e-12)
        assert lambda_n(basis, 3) == lambda_all(basis)[3]
        assert mu_n(basis, 3) == mu_all(basis)[3]
        assert q_k(basis, 3) == q_all(basis)[3]


def test_riesz_kernel_constant_anchors():
    assert_allclose(riesz_kernel_constant(2, 0.5), 1.0 / (2.0 * math.pi), rtol=1e-14)
    assert_allclose(riesz_kernel_constant(3, 0.5), 1.0 / (2.0 * math.pi**2), rtol=1e-14)
    with pytest.raises(ValueError):
        riesz_kernel_constant(1, 0.5)  # needs s < N/2
    with pytest.raises(ValueError):
        riesz_kernel_constant(2, 1.5)


def test_mass_closed_form_against_quadrature():
    # integrate the density over the ball: only the n = 0 mode contributes
    rng = np.random.default_rng(998)
    for dim, s in [(1, 0.3), (2, 0.5), (3, 0.7)]:
        basis = BasisParams(dim=dim, s=s, trunc=10)
        coeffs = _random_coeffs(basis, rng)
        rule = gauss_jacobi_rule(basis.jacobi_alpha, basis.jacobi_beta, 24)
        table = jacobi_table(basis.trunc, basis.jacobi_alpha, basis.jacobi_beta, rule.nodes)
        surface = 2.0 * math.pi ** (dim / 2.0) / special.gamma(dim / 2.0)
        quad_mass = (
            surface * 2.0 ** (s - dim / 2.0 - 1.0) * rule.integrate(coeffs.c @ table)
        )
        assert_allclose(mass(basis, coeffs), quad_mass, rtol=1e-12)


def test_mass_anchor_and_higher_mode_independence():
    basis = BasisParams(dim=2, s=0.5, trunc=6)
    base = SpectralCoefficients(c=np.array([1.0, 0, 0, 0, 0, 0, 0.0]), a=1.0)
    assert_allclose(mass(basis, base), 2.0 * math.pi, rtol=1e-14)
    bumped = SpectralCoefficients(c=np.array([1.0, 0.4, -0.2, 0.1, 0, 0, 0.05]), a=1.0)
    assert mass(basis, bumped) == pytest.approx(mass(basis, base), rel=1e-14)


def test_far_field_constant_identity():
    # r^(N-2s) u -> mass * c_{N,s}; equivalently mass * c_{N,s} = lambda_0 mu_0 c_0
    rng = np.random.default_rng(60)
    for dim, s in [(1, 0.2), (2, 0.5), (3, 0.4), (2, 0.85)]:
        basis = BasisParams(dim=dim, s=s, trunc=0)
        c0 = float(rng.uniform(0.5, 2.0))
        coeffs = SpectralCoefficients(c=np.array([c0]), a=1.0)
        lhs = mass(basis, coeffs) * riesz_kernel_constant(dim, s)
        rhs = lambda_n(basis, 0) * mu_n(basis, 0) * c0
        assert_allclose(lhs, rhs, rtol=1e-12)


def test_u_continuous_across_boundary():
    # the exterior expansion carries a (r - 1)^s edge term, so the two-sided
    # gap closes like eps^s rather than eps; check the value and the rate
    rng = np.random.default_rng(777)
    for dim, s in [(1, 0.25), (2, 0.5), (3, 0.6)]:
        basis = BasisParams(dim=dim, s=s, trunc=8)
        coeffs = _random_coeffs(basis, rng)
        gaps = []
        for eps in (1e-9, 1e-7, 1e-5):
            left = u_inside(basis, coeffs, np.array([1.0 - eps]))[0]
            right = u_outside(basis, coeffs, np.array([1.0 + eps]))[0]
            gaps.append(abs(left - right))
        assert gaps[0] < 1e-1 * max(1.0, abs(left))
        assert gaps[0] < gaps[1] < gaps[2]
        measured_rate = math.log(gaps[2] / gaps[0]) / math.log(1e4)
        assert measured_rate == pytest.approx(s, abs=0.05)


def test_u_inside_matches_direct_convolution_1d():
    # capstone oracle: the Riesz potential of the weighted Jacobi density,
    # computed as the raw singular convolution integral in one dimension
    dim, s = 1, 0.3
    basis = BasisParams(dim=dim, s=s, trunc=3)
    c_ns = riesz_kernel_constant(dim, s)
    rng = np.random.default_rng(42)
    c = rng.standard_normal(4)
    coeffs = SpectralCoefficients(c=c, a=1.0)

    def density(y):
        t = 2.0 * y * y - 1.0
        acc = sum(
            c[n] * jacobi_p(n, -s, dim / 2.0 - 1.0, np.array([t]))[0] for n in range(4)
        )
        return (1.0 - y * y) ** (-s) * acc

    for x in (0.0, 0.37, 0.82, 1.7):
        val, err = integrate.quad(
            lambda y: density(y) * abs(x - y) ** (2.0 * s - 1.0),
            -1.0,
            1.0,
            points=[p for p in (-x, x) if -1.0 < p < 1.0] or None,
            limit=400,
        )
        direct = c_ns * val
        if x <= 1.0:
            spectral = u_inside(basis, coeffs, np.array([x]))[0]
        else:
            spectral = u_outside(basis, coeffs, np.array([x]))[0]
        assert_allclose(direct, spectral, rtol=1e-8)


def test_far_field_asymptote():
    basis = BasisParams(dim=2, s=0.5, trunc=5)
    rng = np.random.default_rng(31)
    coeffs = _random_coeffs(basis, rng)
    r = 80.0
    exact = u_outside(basis, coeffs, np.array([r]))[0]
    asym = mass(basis, coeffs) * riesz_kernel_constant(2, 0.5) * r ** (2 * 0.5 - 2)
    assert_allclose(exact, asym, rtol=1e-3)


def test_evaluation_domains():
    basis = BasisParams(dim=2, s=0.5, trunc=3)
    coeffs = SpectralCoefficients(c=np.array([1.0, 0.1, 0.0, 0.0]), a=1.0)
    with pytest.raises(ValueError):
        u_inside(basis, coeffs, np.array([1.1]))
    with pytest.raises(ValueError):
        u_outside(basis, coeffs, np.array([0.9]))
    assert rho_eval(basis, coeffs, np.array([1.0, 2.5]))[0] == 0.0
    assert rho_eval(basis, coeffs, np.array([1.0, 2.5]))[1] == 0.0


def test_oscillation_and_multiplier_match_potential():
    basis = BasisParams(dim=2, s=0.5, trunc=7)
    rng = np.random.default_rng(12)
    coeffs = _random_coeffs(basis, rng)
    u0 = u_inside(basis, coeffs, np.array([0.0]))[0]
    u1 = u_inside(basis, coeffs, np.array([1.0]))[0]
    assert_allclose(oscillation(basis, coeffs), u0 - u1, rtol=1e-12)
    assert_allclose(boundary_multiplier(basis, coeffs), u1, rtol=1e-12)


def test_rho_eval_against_weighted_sum():
    basis = BasisParams(dim=2, s=0.5, trunc=5)
    rng = np.random.default_rng(5150)
    coeffs = _random_coeffs(basis, rng)
    r = np.array([0.0, 0.3, 0.9])
    t = 2.0 * r * r - 1.0
    table = jacobi_table(5, basis.jacobi_alpha, basis.jacobi_beta, t)
    expected = (1.0 - r * r) ** (-0.5) * (coeffs.c @ table)
    assert_allclose(rho_eval(basis, coeffs, r), expected, rtol=1e-13)
