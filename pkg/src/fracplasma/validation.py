"""Numerical oracles: analytic identities checked against computed solutions.

Each check compares two independently computed quantities and returns a
:class:`CheckReport` rather than raising, so a driver can run the whole
battery on a possibly-bad solution file and report everything at once.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .groundstate import GroundStateSolution, rescale
from .riesz import (
    BasisParams,
    SpectralCoefficients,
    lambda_all,
    mu_all,
    q_all,
    riesz_kernel_constant,
    u_inside,
)
from .solver import family_residual
from .specfun import gauss_jacobi_rule, gauss_sum_at_one, jacobi_at_one, jacobi_table

__all__ = [
    "CheckReport",
    "CoefficientDecayReport",
    "check_boundary_continuity",
    "check_far_field_mass",
    "check_orthogonality",
    "check_pohozaev",
    "check_scaling_consistency",
    "coefficient_decay_report",
]

#: below this magnitude both sides count as zero and the check passes
_ABS_FLOOR = 1e-14
#: tail ratio above which a solution counts as under-resolved
_RESOLVED_TAIL = 1e-8


@dataclass(frozen=True)
class CheckReport:
    """Outcome of one identity check."""

    name: str
    value_left: float
    value_right: float
    relative_error: float
    passed: bool
    tolerance: float

    def __str__(self) -> str:  # pragma: no cover - cosmetic
        state = "passed" if self.passed else "FAILED"
        return (
            f"{self.name}: {state} (left={self.value_left:.12g}, "
            f"right={self.value_right:.12g}, rel={self.relative_error:.3e}, "
            f"tol={self.tolerance:g})"
        )


def _report(name: str, left: float, right: float, tol: float) -> CheckReport:
    denom = max(abs(left), abs(right))
    if denom < _ABS_FLOOR:
        rel = 0.0
    else:
        rel = abs(left - right) / denom
    return CheckReport(
        name=name,
        value_left=float(left),
        value_right=float(right),
        relative_error=float(rel),
        passed=bool(rel <= tol),
        tolerance=tol,
    )


def check_pohozaev(sol: GroundStateSolution, tol: float = 1e-6) -> CheckReport:
    """Virial balance of a ground state.

    Compares ``(N-2s)/2 * int_B u (u-C)_+^p`` with ``N/(p+1) *
    int_B (u-C)_+^(p+1)`` over the support ball; the source strength cancels
    from both sides.  The identity is scale-invariant, so it applies to any
    member of the scaling family.
    """
    basis = sol.params.basis
    p = sol.params.p
    rule = gauss_jacobi_rule(0.0, basis.jacobi_beta, sol.params.resolved_quad_order)
    radii = np.sqrt(0.5 * (1.0 + rule.nodes))
    scale = sol.support_radius ** (2.0 * basis.s)
    u_vals = scale * u_inside(basis, sol.coeffs, radii)
    excess = np.maximum(u_vals - sol.multiplier, 0.0)
    surface = 2.0 * math.pi ** (0.5 * basis.dim) / math.gamma(0.5 * basis.dim)
    prefactor = surface * sol.support_radius**basis.dim / 2.0 ** (0.5 * basis.dim + 1.0)
    left = 0.5 * (basis.dim - 2.0 * basis.s) * prefactor * rule.integrate(u_vals * excess**p)
    right = basis.dim / (p + 1.0) * prefactor * rule.integrate(excess ** (p + 1.0))
    return _report("pohozaev", left, right, tol)


def check_boundary_continuity(params: BasisParams, tol: float = 1e-10) -> list[CheckReport]:
    """Interior and exterior potential branches agree at the support boundary.

    For each degree the interior value ``lambda_n P_n(1)`` must match the
    exterior limit ``lambda_n mu_n 2F1(...; 1)`` evaluated by Gauss
    summation.
    """
    lam = lambda_all(params)
    mu = mu_all(params)
    s = params.s
    half = 0.5 * params.dim
    reports = []
    for n in range(params.trunc + 1):
        left = lam[n] * jacobi_at_one(n, params.jacobi_alpha)
        limit = gauss_sum_at_one(1.0 - s + n, half + n - s, 1.0 + 2.0 * n + half - s)
        right = lam[n] * mu[n] * limit
        reports.append(_report(f"boundary_continuity[n={n}]", left, right, tol))
    return reports


def check_far_field_mass(
    sol: GroundStateSolution, r_probe: float = 50.0, tol: float = 1e-3
) -> CheckReport:
    """Far-field decay carries the total mass.

    ``r^(N-2s) u(r) / c_{N,s}`` at the probe radius must reproduce the mass;
    the neglected terms are ``O(r^-2)`` relative, so the default probe at 50
    leaves two orders of margin at the default tolerance.
    """
    if r_probe <= sol.support_radius:
        raise ValueError(
            f"probe radius must exceed the support radius {sol.support_radius}, got {r_probe}"
        )
    basis = sol.params.basis
    c_ns = riesz_kernel_constant(basis.dim, basis.s)
    left = r_probe ** (basis.dim - 2.0 * basis.s) * sol.u(float(r_probe)) / c_ns
    return _report("far_field_mass", left, sol.mass, tol)


def check_scaling_consistency(
    sol: GroundStateSolution, C_new: float, delta: float, factor: float = 10.0
) -> CheckReport:
    """The rescaled solution still solves its own rescaled equation.

    Evaluates the frame-relative system residual of the transformed
    coefficients and passes iff it stays within ``factor`` times the
    original residual (floored near machine zero).
    """
    base = float(np.max(np.abs(family_residual(sol.params, sol.coeffs, sol.support_radius))))
    member = rescale(sol, C_new, delta)
    moved = float(
        np.max(np.abs(family_residual(member.params, member.coeffs, member.support_radius)))
    )
    floor = max(base, _ABS_FLOOR)
    rel = moved / floor
    return CheckReport(
        name=f"scaling_consistency[C={C_new:g},delta={delta:g}]",
        value_left=moved,
        value_right=base,
        relative_error=rel,
        passed=bool(rel <= factor),
        tolerance=factor,
    )


def check_orthogonality(
    params: BasisParams, quad_order: int | None = None, tol: float = 1e-10
) -> CheckReport:
    """Quadrature Gram matrix of the basis is diagonal with entries ``Q_k``.

    Off-diagonal inner products are normalized by ``sqrt(Q_n Q_k)``;
    diagonal entries are compared to the closed form in relative terms.  The
    worst offender of either kind is reported.
    """
    order = quad_order if quad_order is not None else params.trunc + 16
    rule = gauss_jacobi_rule(params.jacobi_alpha, params.jacobi_beta, order)
    table = jacobi_table(params.trunc, params.jacobi_alpha, params.jacobi_beta, rule.nodes)
    gram = (table * rule.weights[None, :]) @ table.T
    q = q_all(params)
    norm = np.sqrt(np.outer(q, q))
    scaled = gram / norm
    off = scaled - np.diag(np.diag(scaled))
    max_off = float(np.max(np.abs(off))) if params.trunc > 0 else 0.0
    max_diag = float(np.max(np.abs(np.diag(gram) - q) / q))
    worst = max(max_off, max_diag)
    return CheckReport(
        name="orthogonality",
        value_left=max_off,
        value_right=max_diag,
        relative_error=worst,
        passed=bool(worst <= tol),
        tolerance=tol,
    )


@dataclass(frozen=True)
class CoefficientDecayReport:
    """Magnitude sequence of the coefficients with a fitted tail slope.

    ``slope`` is the log-log fit of ``|c_n|`` against ``n`` over the last
    half of the indices (``nan`` when fewer than two nonzero points exist).
    ``under_resolved`` mirrors the tail-ratio warning threshold; a
    ``degenerate`` report marks the all-zero vector.
    """

    entries: tuple[tuple[int, float], ...]
    slope: float
    tail_ratio: float
    under_resolved: bool
    degenerate: bool

    def __iter__(self):
        return iter(self.entries)


def coefficient_decay_report(sol: GroundStateSolution) -> CoefficientDecayReport:
    """Tail-decay diagnostic behind the truncation-order warnings."""
    coeffs: SpectralCoefficients = sol.coeffs
    mags = np.abs(coeffs.c)
    entries = tuple((int(n), float(v)) for n, v in enumerate(mags))
    tail = coeffs.tail_ratio
    degenerate = bool(np.all(mags == 0.0))
    lo = max(mags.size // 2, 1)
    idx = np.arange(mags.size)[lo:]
    vals = mags[lo:]
    keep = vals > 0.0
    if degenerate or np.count_nonzero(keep) < 2:
        slope = float("nan")
    else:
        slope = float(np.polyfit(np.log(idx[keep]), np.log(vals[keep]), 1)[0])
    return CoefficientDecayReport(
        entries=entries,
        slope=slope,
        tail_ratio=tail,
        under_resolved=bool(tail > _RESOLVED_TAIL),
        degenerate=degenerate,
    )
