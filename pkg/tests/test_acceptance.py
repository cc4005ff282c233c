"""Acceptance battery: one test per shipped guarantee, at its stated tolerance.

Each test prints a single summary line with the measured values behind the
verdict; ``pytest -v`` therefore shows one pass/fail line per criterion.
Solutions are cached at module level so the battery stays inside its runtime
budgets.
"""

import math
import time

import numpy as np
import pytest

from fracplasma.groundstate import (
    from_coefficients,
    mass_scaling,
    rescale,
    supercritical_constant,
    to_steady_state,
)
from fracplasma.riesz import (
    BasisParams,
    SpectralCoefficients,
    lambda_all,
    mu_all,
    q_all,
    riesz_kernel_constant,
)
from fracplasma.solver import (
    ProblemParams,
    family_residual,
    jacobian_system,
    residual_system,
    solve,
    solve_continuation,
    solve_eigen_p1,
    solve_newton,
)
from fracplasma.validation import (
    check_boundary_continuity,
    check_far_field_mass,
    check_orthogonality,
    check_pohozaev,
    check_scaling_consistency,
    coefficient_decay_report,
)

_CACHE: dict = {}

#: the solver convergence matrix of criterion 3; p < 1 throughout
_MATRIX = (
    (1, 0.2, 0.5),
    (1, 0.3, 0.5),
    (1, 0.4, 0.5),
    (2, 0.5, 0.3),
    (2, 0.5, 0.5),
    (2, 0.5, 0.8),
)


def _params(dim, s, p, trunc=64):
    return ProblemParams(basis=BasisParams(dim=dim, s=s, trunc=trunc), p=p)


def _solution(dim, s, p, trunc=64):
    key = (dim, s, p, trunc)
    if key not in _CACHE:
        _CACHE[key] = solve(_params(dim, s, p, trunc))
    return _CACHE[key]


def _p1_pair():
    """Eigen and Newton solves of the p = 1 problem from independent starts."""
    if "p1" not in _CACHE:
        params = _params(2, 0.5, 1.0)
        eig_coeffs, eig_diag = solve_eigen_p1(params)
        rng = np.random.default_rng(11)
        init = SpectralCoefficients(
            c=eig_coeffs.c * (1.0 + 1e-3 * rng.standard_normal(eig_coeffs.c.size)),
            a=1.01 * eig_coeffs.a,
        )
        newt_coeffs, newt_diag = solve_newton(params, init)
        _CACHE["p1"] = (
            from_coefficients(params, eig_coeffs, eig_diag),
            from_coefficients(params, newt_coeffs, newt_diag),
        )
    return _CACHE["p1"]


def _continuation_run():
    if "cont" not in _CACHE:
        sol, diag = solve_continuation(_params(2, 0.5, 1.6), 1.6)
        _CACHE["cont"] = (sol, diag)
        _CACHE[(2, 0.5, 1.6, 64)] = sol
    return _CACHE["cont"]


def _all_converged():
    """Every converged solution the convergence-matrix criterion produces."""
    sols = [_solution(*case) for case in _MATRIX]
    sols.append(_p1_pair()[0])
    sols.extend(_solution(2, 0.5, p) for p in (1.2, 1.4))
    sols.append(_continuation_run()[0])
    return [sol for sol in sols if sol.diagnostics.converged]


def test_criterion_01_basis_identities():
    start = time.perf_counter()
    pairs = ((1, 0.2), (1, 0.3), (1, 0.45), (2, 0.25), (2, 0.5), (2, 0.75), (3, 0.5))
    worst = 0.0
    for dim, s in pairs:
        basis = BasisParams(dim=dim, s=s, trunc=64)
        ortho = check_orthogonality(basis, tol=1e-10)
        assert ortho.passed, str(ortho)
        worst = max(worst, ortho.relative_error)
        for report in check_boundary_continuity(basis, tol=1e-10):
            assert report.passed, str(report)
            worst = max(worst, report.relative_error)
    elapsed = time.perf_counter() - start
    assert elapsed < 10.0
    print(
        f"criterion 01 basis identities: PASS "
        f"(7 bases, n,k <= 64, worst rel {worst:.3e}, {elapsed:.2f}s)"
    )


def test_criterion_02_closed_form_constants():
    start = time.perf_counter()
    basis = BasisParams(dim=2, s=0.5, trunc=1)
    assert lambda_all(basis)[0] == pytest.approx(math.pi / 2.0, rel=1e-12)
    assert mu_all(basis)[0] == pytest.approx(2.0 / math.pi, rel=1e-12)
    assert q_all(basis)[0] == pytest.approx(2.0 * math.sqrt(2.0), rel=1e-12)
    assert riesz_kernel_constant(2, 0.5) == pytest.approx(1.0 / (2.0 * math.pi), rel=1e-12)
    assert riesz_kernel_constant(3, 0.5) == pytest.approx(1.0 / (2.0 * math.pi**2), rel=1e-12)
    assert supercritical_constant(3, 0.5, 3.0) == pytest.approx(math.sqrt(0.125), rel=1e-12)
    elapsed = time.perf_counter() - start
    assert elapsed < 1.0
    print(f"criterion 02 closed-form constants: PASS (6 anchors at 1e-12, {elapsed:.2f}s)")


def test_criterion_03_solver_convergence_matrix():
    start = time.perf_counter()
    for case in _MATRIX:
        sol = _solution(*case)
        assert sol.diagnostics.converged, case
        assert sol.diagnostics.final_residual_inf <= 1e-10, case
    eig, newt = _p1_pair()
    agree = abs(eig.coeffs.a - newt.coeffs.a) / eig.coeffs.a
    assert agree <= 1e-8
    sol, diag = _continuation_run()
    assert sol.diagnostics.converged
    stops = [p for p, _ in diag.continuation_path]
    residuals = [res for _, res in diag.continuation_path]
    assert stops[0] == 1.0 and stops[-1] == 1.6
    assert all(p2 > p1 for p1, p2 in zip(stops, stops[1:]))
    assert max(residuals) <= 1e-10
    elapsed = time.perf_counter() - start
    assert elapsed < 60.0
    print(
        f"criterion 03 solver convergence matrix: PASS "
        f"(6 fixed-point cases, eigen/Newton gap {agree:.2e}, "
        f"continuation 1.0->1.6 worst step residual {max(residuals):.2e}, {elapsed:.1f}s)"
    )


def test_criterion_04_pohozaev_certificate():
    checked = 0
    worst = 0.0
    for sol in _all_converged():
        if sol.params.p < 1.0:
            continue
        report = check_pohozaev(sol, tol=1e-6)
        assert report.passed, str(report)
        worst = max(worst, report.relative_error)
        checked += 1
    base = _continuation_run()[0]
    c = base.coeffs.c.copy()
    c[2] *= 1.05
    fake = from_coefficients(
        base.params, SpectralCoefficients(c=c, a=base.coeffs.a), base.diagnostics
    )
    control = check_pohozaev(fake, tol=1e-6)
    assert not control.passed
    print(
        f"criterion 04 pohozaev certificate: PASS "
        f"({checked} solutions at 1e-6, worst rel {worst:.3e}; "
        f"5% negative control rel {control.relative_error:.3e} rejected)"
    )


def test_criterion_05_far_field_mass():
    worst_probe = 0.0
    worst_exact = 0.0
    sols = _all_converged()
    for sol in sols:
        report = check_far_field_mass(sol, r_probe=50.0, tol=1e-3)
        assert report.passed, str(report)
        worst_probe = max(worst_probe, report.relative_error)
        basis = sol.params.basis
        left = sol.mass * riesz_kernel_constant(basis.dim, basis.s)
        right = lambda_all(basis)[0] * mu_all(basis)[0] * sol.coeffs.c[0]
        exact = abs(left - right) / abs(right)
        assert exact <= 1e-10
        worst_exact = max(worst_exact, exact)
    print(
        f"criterion 05 far-field mass: PASS "
        f"({len(sols)} solutions, probe r=50 worst rel {worst_probe:.3e}, "
        f"exact identity worst rel {worst_exact:.3e})"
    )


def test_criterion_06_scaling_family():
    sol = _solution(2, 0.5, 1.5)
    rng = np.random.default_rng(23)
    worst = 0.0
    for _ in range(20):
        C_new = float(rng.uniform(0.5, 3.0))
        delta = float(rng.uniform(0.5, 3.0))
        report = check_scaling_consistency(sol, C_new, delta)
        assert report.passed, str(report)
        worst = max(worst, report.value_left)
    # negative control: drop the delta^(2s) factor on the source strength
    basis = sol.params.basis
    sigma = 2.0 ** (2.0 * basis.s)
    wrong = SpectralCoefficients(c=sigma * sol.coeffs.c, a=sol.coeffs.a)
    res = float(np.max(np.abs(family_residual(sol.params, wrong, 0.5))))
    assert res > 1e-3
    print(
        f"criterion 06 scaling family: PASS "
        f"(20 random members, worst residual {worst:.3e}; "
        f"omitted-factor control residual {res:.3e} rejected)"
    )


def test_criterion_07_mass_scaling_laws():
    # m = 2 (p = 1): the support radius does not move with the mass
    view1 = to_steady_state(_p1_pair()[0], 1.0)
    tripled = mass_scaling(view1, 3.0 * view1.mass)
    radius_shift = abs(
        tripled.solution.support_radius / view1.solution.support_radius - 1.0
    )
    assert radius_shift <= 1e-12
    # m = 1.8 (p = 1.25) at (N, s) = (2, 0.5): doubling the mass multiplies
    # the multiplier K by 2^(2s(m-1)/((m-2)N+2s)) = 2^(4/3)
    view2 = to_steady_state(_solution(2, 0.5, 1.25), 1.0)
    doubled = mass_scaling(view2, 2.0 * view2.mass)
    factor = doubled.multiplier_K / view2.multiplier_K
    factor_err = abs(factor / 2.0 ** (4.0 / 3.0) - 1.0)
    assert factor_err <= 1e-12
    print(
        f"criterion 07 mass-scaling laws: PASS "
        f"(m=2 radius shift {radius_shift:.2e}, m=1.8 K-factor error {factor_err:.2e})"
    )


def test_criterion_08_monotone_positive_profiles():
    r = np.linspace(0.0, 3.0, 200)
    worst_du = -np.inf
    worst_rho = 0.0
    sols = _all_converged()
    for sol in sols:
        u = sol.u(r)
        rho = sol.rho(r)
        worst_du = max(worst_du, float(np.max(np.diff(u))))
        worst_rho = min(worst_rho, float(np.min(rho) / np.max(rho)))
        assert np.all(np.diff(u) <= 1e-8)
        assert np.min(rho) >= -1e-8 * np.max(rho)
    print(
        f"criterion 08 monotone/positive profiles: PASS "
        f"({len(sols)} solutions on 200-point grids, "
        f"max du {worst_du:.2e}, min rho/max rho {worst_rho:.2e})"
    )


def test_criterion_09_coefficient_decay_ordering():
    start = time.perf_counter()
    slopes = {}
    for p in (1.0, 1.5, 2.0):
        sol = _solution(2, 0.5, p, trunc=96)
        slopes[p] = coefficient_decay_report(sol).slope
    elapsed = time.perf_counter() - start
    print(
        f"criterion 09 coefficient-decay ordering: measured slopes "
        f"p=1: {slopes[1.0]:+.4f}, p=1.5: {slopes[1.5]:+.4f}, "
        f"p=2: {slopes[2.0]:+.4f} ({elapsed:.1f}s)"
    )
    assert elapsed < 120.0
    # expected strict ordering fastest-to-slowest in p; the p = 1.5 tail sits
    # on the rounding plateau (p + s = 2 cancels the algebraic obstruction),
    # so its fitted slope is not comparable and the ordering does not hold
    assert slopes[1.0] < slopes[1.5] < slopes[2.0], (
        "tail-decay slopes are not strictly ordered fastest-to-slowest: "
        f"p=1: {slopes[1.0]:+.4f}, p=1.5: {slopes[1.5]:+.4f}, p=2: {slopes[2.0]:+.4f}"
    )


def test_criterion_10_jacobian_correctness():
    params = _params(2, 0.5, 1.5, trunc=32)
    sol = _solution(2, 0.5, 1.5, trunc=32)
    rng = np.random.default_rng(31)
    h = 1e-6
    worst = 0.0
    for _ in range(5):
        c = sol.coeffs.c * (1.0 + 0.01 * rng.standard_normal(sol.coeffs.c.size))
        a = float(sol.coeffs.a * rng.uniform(0.95, 1.05))
        point = SpectralCoefficients(c=c, a=a)
        jac = jacobian_system(params, point)
        n = c.size
        fd = np.empty_like(jac)
        for j in range(n + 1):
            cp, cm = c.copy(), c.copy()
            ap = am = a
            if j < n:
                cp[j] += h
                cm[j] -= h
            else:
                ap, am = a + h, a - h
            plus = residual_system(params, SpectralCoefficients(c=cp, a=ap))
            minus = residual_system(params, SpectralCoefficients(c=cm, a=am))
            fd[:, j] = (plus - minus) / (2.0 * h)
        diff = float(np.max(np.abs(jac - fd)))
        worst = max(worst, diff)
        assert diff <= 1e-5
    print(
        f"criterion 10 jacobian correctness: PASS "
        f"(5 random feasible points, K=32, worst entry gap {worst:.3e})"
    )
