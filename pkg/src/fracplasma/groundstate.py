"""Ground-state solutions, their scaling family, and steady-state views.

A solved coefficient vector is packaged with its derived quantities
(boundary multiplier, mass, central value, support radius).  The full
solution family is generated by ``u -> gamma * u(delta .)``, which maps the
coefficients, source strength, radius and mass by explicit factors; the
same transform realizes both multiplier/radius rescaling and the mass
scaling of aggregation-diffusion steady states.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass, replace

import numpy as np

from .riesz import (
    BasisParams,
    SpectralCoefficients,
    boundary_multiplier,
    mass as basis_mass,
    oscillation,
    riesz_kernel_constant,
    rho_eval,
    u_inside,
    u_outside,
)
from .solver import ProblemParams, RegimeError, SolveDiagnostics

__all__ = [
    "GroundStateSolution",
    "Regime",
    "SteadyStateView",
    "classify_regime",
    "critical_bubble",
    "far_field",
    "from_coefficients",
    "mass_scaling",
    "rescale",
    "supercritical_constant",
    "to_steady_state",
]


@dataclass(frozen=True)
class GroundStateSolution:
    """A radially decreasing ground state with explicit spectral data.

    The potential is ``u(r) = R^(2s) * uhat(r / R)`` where ``uhat`` is the
    unit-ball potential of ``coeffs`` and ``R`` the support radius; the
    density is ``rho(r) = rhohat(r / R)`` and the total mass carries the
    extra ``R^N`` volume factor.  For solver output ``R = 1`` and the
    height drop ``central_value - multiplier`` equals 1.
    """

    params: ProblemParams
    coeffs: SpectralCoefficients
    multiplier: float
    mass: float
    central_value: float
    support_radius: float
    diagnostics: SolveDiagnostics

    @property
    def oscillation(self) -> float:
        """Height drop ``u(0) - u(R)``."""
        return self.central_value - self.multiplier

    def u(self, r):
        """Potential at radius ``r >= 0`` (scalar or array), inside or out."""
        scalar = np.isscalar(r)
        r = np.atleast_1d(np.asarray(r, dtype=float))
        if np.any(r < 0.0):
            raise ValueError("radius must be nonnegative")
        basis = self.params.basis
        rr = self.support_radius
        scale = rr ** (2.0 * basis.s)
        out = np.empty_like(r)
        inside = r <= rr
        if np.any(inside):
            out[inside] = scale * u_inside(basis, self.coeffs, r[inside] / rr)
        if np.any(~inside):
            out[~inside] = scale * u_outside(basis, self.coeffs, r[~inside] / rr)
        return float(out[0]) if scalar else out

    def rho(self, r):
        """Density at radius ``r``; zero outside the support."""
        scalar = np.isscalar(r)
        r = np.atleast_1d(np.asarray(r, dtype=float))
        if np.any(r < 0.0):
            raise ValueError("radius must be nonnegative")
        vals = rho_eval(self.params.basis, self.coeffs, r / self.support_radius)
        return float(vals) if scalar else vals


def from_coefficients(
    params: ProblemParams,
    coeffs: SpectralCoefficients,
    diagnostics: SolveDiagnostics,
    support_radius: float = 1.0,
) -> GroundStateSolution:
    """Package a coefficient vector into a solution with derived quantities."""
    if support_radius <= 0.0:
        raise ValueError(f"support_radius must be positive, got {support_radius}")
    basis = params.basis
    scale = support_radius ** (2.0 * basis.s)
    mult = scale * boundary_multiplier(basis, coeffs)
    osc = scale * oscillation(basis, coeffs)
    total = support_radius**basis.dim * basis_mass(basis, coeffs)
    return GroundStateSolution(
        params=params,
        coeffs=coeffs,
        multiplier=mult,
        mass=total,
        central_value=mult + osc,
        support_radius=support_radius,
        diagnostics=diagnostics,
    )


def rescale(sol: GroundStateSolution, C_new: float, delta: float) -> GroundStateSolution:
    """Scaling-family member ``u -> C_new * u(delta .)``.

    ``C_new`` is the amplitude applied to the profile, so every threshold
    quantity scales with it: the boundary multiplier and central value pick
    up a factor ``C_new``, the source strength becomes ``C_new^(1-p) *
    delta^(2s) * a``, the support radius divides by ``delta`` and the mass
    scales by ``C_new * delta^(2s-N)``.  ``(C_new, delta) = (1, 1)`` is the
    identity.
    """
    if C_new <= 0.0 or delta <= 0.0:
        raise ValueError(f"C_new and delta must be positive, got ({C_new}, {delta})")
    if not sol.diagnostics.converged:
        raise ValueError("rescale requires a converged solution")
    basis = sol.params.basis
    p = sol.params.p
    sigma = C_new * delta ** (2.0 * basis.s)
    coeffs = SpectralCoefficients(
        c=sigma * sol.coeffs.c,
        a=C_new ** (1.0 - p) * delta ** (2.0 * basis.s) * sol.coeffs.a,
    )
    return from_coefficients(
        sol.params,
        coeffs,
        replace(sol.diagnostics),
        support_radius=sol.support_radius / delta,
    )


def far_field(sol: GroundStateSolution, r: float) -> tuple[float, float]:
    """Exact exterior potential at ``r`` and its leading asymptote.

    Returns ``(u(r), mass * c_{N,s} * r^(2s-N))``; the two agree to
    ``O(r^-2)`` relative as ``r`` grows.  Requires ``r`` beyond the support.
    """
    if r <= sol.support_radius:
        raise ValueError(
            f"far field needs r > support radius {sol.support_radius}, got {r}"
        )
    basis = sol.params.basis
    exact = sol.u(float(r))
    c_ns = riesz_kernel_constant(basis.dim, basis.s)
    surrogate = sol.mass * c_ns * float(r) ** (2.0 * basis.s - basis.dim)
    return exact, surrogate


def supercritical_constant(dim: int, s: float, p: float) -> float:
    """Amplitude of the explicit singular profile ``c |x|^(-2s/(p-1))``.

    Only defined strictly above the critical exponent; at or below it the
    profile does not solve the zero-multiplier equation and the call raises
    instead of returning a meaningless number.
    """
    probe = BasisParams(dim=dim, s=s, trunc=0)  # reuse the domain validation
    crit = probe.critical_exponent
    if p <= crit:
        raise RegimeError(
            f"supercritical constant needs p > (N+2s)/(N-2s) = {crit:.12g}, got {p}"
        )
    q = s / (p - 1.0)
    half = 0.5 * dim
    args = (half - q, p * q, q, half - p * q)
    for val in args:
        if val <= 0.0:
            raise ValueError(f"gamma argument {val} nonpositive for (N,s,p)=({dim},{s},{p})")
    ln = (
        math.lgamma(args[0])
        + math.lgamma(args[1])
        - math.lgamma(args[2])
        - math.lgamma(args[3])
        - 2.0 * s * math.log(2.0)
    )
    return math.exp(ln / (p - 1.0))


def critical_bubble(dim: int, s: float, t: float, r, amplitude: float = 1.0):
    """Explicit solution family at the critical exponent.

    ``amplitude * (t / (t^2 + r^2))^((N-2s)/2)`` for scale parameter
    ``t > 0``; closed under ``u -> lam^((N-2s)/2) u(lam .)`` with
    ``t -> t / lam``.  ``r`` may be scalar or array.
    """
    BasisParams(dim=dim, s=s, trunc=0)
    if t <= 0.0:
        raise ValueError(f"scale parameter t must be positive, got {t}")
    scalar = np.isscalar(r)
    r = np.atleast_1d(np.asarray(r, dtype=float))
    if np.any(r < 0.0):
        raise ValueError("radius must be nonnegative")
    vals = amplitude * (t / (t * t + r * r)) ** (0.5 * (dim - 2.0 * s))
    return float(vals[0]) if scalar else vals


class Regime(enum.Enum):
    """Aggregation-diffusion regime of the exponent ``m`` at given ``(N, s)``."""

    DIFFUSION_DOMINATED = "diffusion_dominated"
    FAIR_COMPETITION = "fair_competition"
    AGGREGATION_DOMINATED_SUBCRITICAL = "aggregation_dominated_subcritical"
    CRITICAL = "critical"
    SUPERCRITICAL = "supercritical"


def classify_regime(dim: int, s: float, m: float) -> Regime:
    """Place a diffusion exponent ``m > 1`` relative to the two thresholds.

    ``m_c = 2 - 2s/N`` separates diffusion- from aggregation-dominated
    behaviour; ``2N/(N+2s)`` is the existence threshold below which the
    corresponding nonlinearity is supercritical.
    """
    BasisParams(dim=dim, s=s, trunc=0)
    if not (np.isfinite(m) and m > 1.0):
        raise ValueError(f"m must exceed 1, got {m}")
    m_fair = 2.0 - 2.0 * s / dim
    m_crit = 2.0 * dim / (dim + 2.0 * s)
    if math.isclose(m, m_fair, rel_tol=1e-12):
        return Regime.FAIR_COMPETITION
    if math.isclose(m, m_crit, rel_tol=1e-12):
        return Regime.CRITICAL
    if m > m_fair:
        return Regime.DIFFUSION_DOMINATED
    if m < m_crit:
        return Regime.SUPERCRITICAL
    return Regime.AGGREGATION_DOMINATED_SUBCRITICAL


@dataclass(frozen=True)
class SteadyStateView:
    """A ground state reinterpreted as an aggregation-diffusion steady state.

    The potential equation with exponent ``p`` matches the steady equation
    of diffusion exponent ``m = (p+1)/p``, sensitivity ``chi`` and Lagrange
    multiplier ``K = chi * C`` once the source strength is pinned to
    ``(p+1)^-p * chi^p``; ``solution`` holds that pinned family member.
    """

    m: float
    chi: float
    multiplier_K: float
    mass: float
    regime: Regime
    solution: GroundStateSolution

    def density(self, r):
        """Steady density at radius ``r``."""
        return self.solution.rho(r)

    @property
    def radius_mass_trend(self) -> str:
        """How the support radius responds to growing mass at fixed ``(m, chi)``."""
        if math.isclose(self.m, 2.0, rel_tol=1e-12):
            return "constant"
        return "increasing" if self.m > 2.0 else "decreasing"


def to_steady_state(sol: GroundStateSolution, chi: float) -> SteadyStateView:
    """Pin a ground state to the steady-state normalization for given ``chi``.

    Selects the scaling-family member whose source strength equals
    ``(p+1)^-p * chi^p`` (dilating at ``p = 1``, adjusting the multiplier
    otherwise) and reads off ``m`` and ``K``.
    """
    if chi <= 0.0:
        raise ValueError(f"chi must be positive, got {chi}")
    if not sol.diagnostics.converged:
        raise ValueError("steady-state view requires a converged solution")
    basis = sol.params.basis
    p = sol.params.p
    m = (p + 1.0) / p
    a_target = (p + 1.0) ** (-p) * chi**p
    if math.isclose(p, 1.0, rel_tol=0.0, abs_tol=1e-14):
        delta = (a_target / sol.coeffs.a) ** (1.0 / (2.0 * basis.s))
        member = rescale(sol, 1.0, delta)
    else:
        amplitude = (a_target / sol.coeffs.a) ** (1.0 / (1.0 - p))
        member = rescale(sol, amplitude, 1.0)
    return SteadyStateView(
        m=m,
        chi=chi,
        multiplier_K=chi * member.multiplier,
        mass=member.mass,
        regime=classify_regime(basis.dim, basis.s, m),
        solution=member,
    )


def mass_scaling(view: SteadyStateView, M_target: float) -> SteadyStateView:
    """Move along the steady-state family to total mass ``M_target``.

    Valid in the diffusion-dominated regime, where ``(m-2)N + 2s > 0``: the
    multiplier scales by ``(M/M_1)^(2s(m-1)/((m-2)N+2s))`` and the radius by
    ``(M/M_1)^((m-2)/((m-2)N+2s))``; the source strength is unchanged, so
    the result solves the same steady equation.
    """
    if M_target <= 0.0:
        raise ValueError(f"target mass must be positive, got {M_target}")
    if view.regime is not Regime.DIFFUSION_DOMINATED:
        raise RegimeError(
            f"mass scaling requires the diffusion-dominated regime m > 2 - 2s/N, "
            f"got {view.regime.value}: at fair competition the steady-state mass is "
            f"degenerate (fixed by (N, s, chi) alone), and below it no scaling "
            f"reaches an arbitrary mass"
        )
    basis = view.solution.params.basis
    m = view.m
    denom = (m - 2.0) * basis.dim + 2.0 * basis.s
    ratio = M_target / view.mass
    gamma = ratio ** (2.0 * basis.s * (m - 1.0) / denom)
    delta = ratio ** ((2.0 - m) / denom)
    member = rescale(view.solution, gamma, delta)
    return SteadyStateView(
        m=m,
        chi=view.chi,
        multiplier_K=view.chi * member.multiplier,
        mass=member.mass,
        regime=view.regime,
        solution=member,
    )
