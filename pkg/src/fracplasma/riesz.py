"""Weighted Jacobi basis and its Riesz potential, in closed form.

The density ansatz on the unit ball is

    rho(x) = (1 - |x|^2)^(-s) * sum_n c_n P_n(2|x|^2 - 1),

with Jacobi parameters ``alpha = -s`` and ``beta = N/2 - 1``.  Each basis
element has an explicit Riesz potential: a polynomial in ``2r^2 - 1`` of the
same degree inside the ball (eigenvalue ``lambda_n``), and a decaying
hypergeometric tail ``mu_n r^(2s - N - 2n) 2F1(...)`` outside.  This module
provides those constants, the orthogonality normalizers ``Q_k``, and the
pointwise evaluation of the potential and the density.

All gamma-ratio constants are computed in log space and are safe up to very
large truncation orders.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.special import gammaln

from .specfun import hyp2f1, jacobi_at_minus_one, jacobi_at_one, jacobi_table

__all__ = [
    "BasisParams",
    "SpectralCoefficients",
    "boundary_multiplier",
    "lambda_all",
    "lambda_n",
    "mass",
    "mu_all",
    "mu_n",
    "oscillation",
    "q_all",
    "q_k",
    "riesz_kernel_constant",
    "rho_eval",
    "u_inside",
    "u_outside",
]


@dataclass(frozen=True)
class BasisParams:
    """Dimension, fractional order and truncation level of the basis.

    Parameters
    ----------
    dim : int
        Ambient dimension ``N >= 1``.
    s : float
        Fractional order of the Laplacian, ``0 < s < 1``; additionally
        ``s < 1/2`` when ``dim == 1`` so that ``N - 2s > 0``.
    trunc : int
        Highest retained basis degree ``K >= 0``.
    """

    dim: int
    s: float
    trunc: int

    def __post_init__(self):
        if not isinstance(self.dim, int) or self.dim < 1:
            raise ValueError(f"dim must be an integer >= 1, got {self.dim}")
        if not 0.0 < self.s < 1.0:
            raise ValueError(f"s must lie in (0, 1), got {self.s}")
        if self.dim == 1 and self.s >= 0.5:
            raise ValueError(f"dim 1 requires s < 1/2, got s = {self.s}")
        if not isinstance(self.trunc, int) or self.trunc < 0:
            raise ValueError(f"trunc must be an integer >= 0, got {self.trunc}")

    @property
    def jacobi_alpha(self) -> float:
        return -self.s

    @property
    def jacobi_beta(self) -> float:
        return 0.5 * self.dim - 1.0

    @property
    def critical_exponent(self) -> float:
        """Upper bound ``(N + 2s)/(N - 2s)`` for admissible nonlinearities."""
        return (self.dim + 2.0 * self.s) / (self.dim - 2.0 * self.s)


@dataclass(frozen=True)
class SpectralCoefficients:
    """Coefficient vector ``c_0..c_K`` together with the source strength ``a``."""

    c: np.ndarray
    a: float

    def __post_init__(self):
        c = np.asarray(self.c, dtype=float)
        if c.ndim != 1 or c.size == 0:
            raise ValueError("coefficient vector must be one-dimensional and nonempty")
        if not np.all(np.isfinite(c)):
            raise ValueError("coefficient vector contains non-finite entries")
        if not (np.isfinite(self.a) and self.a > 0.0):
            raise ValueError(f"a must be positive and finite, got {self.a}")
        object.__setattr__(self, "c", c)

    @property
    def trunc(self) -> int:
        return self.c.size - 1

    @property
    def tail_ratio(self) -> float:
        """``|c_K| / max_n |c_n|``; zero for the all-zero vector."""
        peak = float(np.max(np.abs(self.c)))
        if peak == 0.0:
            return 0.0
        return float(abs(self.c[-1])) / peak


def _check_degree(params: BasisParams, n: int) -> None:
    if n < 0:
        raise ValueError(f"degree must be >= 0, got {n}")


def lambda_all(params: BasisParams, nmax: int | None = None) -> np.ndarray:
    """Riesz-potential eigenvalues ``lambda_0..lambda_nmax`` (default ``trunc``)."""
    if nmax is None:
        nmax = params.trunc
    n = np.arange(nmax + 1, dtype=float)
    half = 0.5 * params.dim
    s = params.s
    ln = (
        -2.0 * s * math.log(2.0)
        + gammaln(1.0 + n - s)
        + gammaln(half - s + n)
        - gammaln(n + 1.0)
        - gammaln(half + n)
    )
    return np.exp(ln)


def lambda_n(params: BasisParams, n: int) -> float:
    """Eigenvalue ``lambda_n = 2^(-2s) G(1+n-s) G(N/2-s+n) / (n! G(N/2+n))``."""
    _check_degree(params, n)
    return float(lambda_all(params, n)[n])


def mu_all(params: BasisParams, nmax: int | None = None) -> np.ndarray:
    """Exterior amplitudes ``mu_0..mu_nmax`` (default ``trunc``)."""
    if nmax is None:
        nmax = params.trunc
    n = np.arange(nmax + 1, dtype=float)
    half = 0.5 * params.dim
    s = params.s
    ln_beta = gammaln(1.0 + n - s) + gammaln(half + n) - gammaln(1.0 + 2.0 * n + half - s)
    return math.sin(s * math.pi) / math.pi * np.exp(ln_beta)


def mu_n(params: BasisParams, n: int) -> float:
    """Amplitude ``mu_n = sin(pi s)/pi * B(1+n-s, N/2+n)`` of the exterior tail."""
    _check_degree(params, n)
    return float(mu_all(params, n)[n])


def q_all(params: BasisParams, kmax: int | None = None) -> np.ndarray:
    """Orthogonality normalizers ``Q_0..Q_kmax`` (default ``trunc``)."""
    if kmax is None:
        kmax = params.trunc
    k = np.arange(kmax + 1, dtype=float)
    half = 0.5 * params.dim
    s = params.s
    ln = (
        (half - s) * math.log(2.0)
        - np.log(2.0 * k + half - s)
        + gammaln(k + 1.0 - s)
        + gammaln(k + half)
        - gammaln(k + 1.0)
        - gammaln(k + half - s)
    )
    return np.exp(ln)


def q_k(params: BasisParams, k: int) -> float:
    """Weighted norm ``Q_k`` of ``P_k`` under ``(1-t)^(-s) (1+t)^(N/2-1)``."""
    _check_degree(params, k)
    return float(q_all(params, k)[k])


def riesz_kernel_constant(dim: int, s: float) -> float:
    """Normalizing constant ``G(N/2-s) / (pi^(N/2) 4^s G(s))`` of the Riesz kernel."""
    if dim < 1:
        raise ValueError(f"dim must be >= 1, got {dim}")
    if not 0.0 < s < 0.5 * dim:
        raise ValueError(f"s must lie in (0, dim/2), got {s}")
    half = 0.5 * dim
    return math.exp(
        math.lgamma(half - s) - half * math.log(math.pi) - 2.0 * s * math.log(2.0) - math.lgamma(s)
    )


def _coeff_view(params: BasisParams, coeffs: SpectralCoefficients) -> np.ndarray:
    c = coeffs.c
    if c.size != params.trunc + 1:
        raise ValueError(
            f"coefficient length {c.size} does not match trunc + 1 = {params.trunc + 1}"
        )
    return c


def u_inside(params: BasisParams, coeffs: SpectralCoefficients, r):
    """Potential ``u(r) = sum_n lambda_n c_n P_n(2r^2 - 1)`` for ``0 <= r <= 1``.

    ``r`` may be a scalar or an array; the return type matches.
    """
    scalar = np.isscalar(r)
    r = np.atleast_1d(np.asarray(r, dtype=float))
    if np.any(r < 0.0) or np.any(r > 1.0 + 1e-12):
        raise ValueError("u_inside requires 0 <= r <= 1")
    c = _coeff_view(params, coeffs)
    t = np.clip(2.0 * r * r - 1.0, -1.0, 1.0)
    table = jacobi_table(params.trunc, params.jacobi_alpha, params.jacobi_beta, t)
    vals = (lambda_all(params) * c) @ table
    return float(vals[0]) if scalar else vals


def u_outside(params: BasisParams, coeffs: SpectralCoefficients, r):
    """Potential for ``r > 1``: hypergeometric tails ``r^(2s-N-2n) 2F1(...)``.

    Terms whose power-law prefactor underflows are skipped; the series is
    evaluated per node, so array input is supported but scalar-loop priced.
    """
    scalar = np.isscalar(r)
    r = np.atleast_1d(np.asarray(r, dtype=float))
    if np.any(r <= 1.0):
        raise ValueError("u_outside requires r > 1")
    c = _coeff_view(params, coeffs)
    lam = lambda_all(params)
    mu = mu_all(params)
    s = params.s
    half = 0.5 * params.dim
    z = 1.0 / (r * r)
    out = np.zeros_like(r)
    for n in range(params.trunc + 1):
        amp = lam[n] * mu[n] * c[n]
        if amp == 0.0:
            continue
        power = r ** (2.0 * s - params.dim - 2.0 * n)
        live = power > 0.0
        if not np.any(live):
            break
        a_h = 1.0 - s + n
        b_h = half + n - s
        c_h = 1.0 + 2.0 * n + half - s
        f = np.array([hyp2f1(a_h, b_h, c_h, zi) for zi in z[live]])
        out[live] += amp * power[live] * f
    return float(out[0]) if scalar else out


def rho_eval(params: BasisParams, coeffs: SpectralCoefficients, r):
    """Density ``(1-r^2)^(-s) sum_n c_n P_n(2r^2-1)``; zero for ``r >= 1``."""
    scalar = np.isscalar(r)
    r = np.atleast_1d(np.asarray(r, dtype=float))
    if np.any(r < 0.0):
        raise ValueError("rho_eval requires r >= 0")
    c = _coeff_view(params, coeffs)
    out = np.zeros_like(r)
    inside = r < 1.0
    if np.any(inside):
        ri = r[inside]
        t = 2.0 * ri * ri - 1.0
        table = jacobi_table(params.trunc, params.jacobi_alpha, params.jacobi_beta, t)
        out[inside] = (1.0 - ri * ri) ** (-params.s) * (c @ table)
    return float(out[0]) if scalar else out


def _endpoint_deltas(params: BasisParams) -> np.ndarray:
    """Vector of ``P_n(-1) - P_n(1)`` for ``n = 0..trunc``."""
    n = np.arange(params.trunc + 1)
    at_one = np.array([jacobi_at_one(int(k), params.jacobi_alpha) for k in n])
    at_minus = np.array([jacobi_at_minus_one(int(k), params.jacobi_beta) for k in n])
    return at_minus - at_one


def boundary_multiplier(params: BasisParams, coeffs: SpectralCoefficients) -> float:
    """Boundary value ``u(1) = sum_n lambda_n c_n P_n(1)``."""
    c = _coeff_view(params, coeffs)
    at_one = np.array(
        [jacobi_at_one(n, params.jacobi_alpha) for n in range(params.trunc + 1)]
    )
    return float(np.dot(lambda_all(params) * c, at_one))


def oscillation(params: BasisParams, coeffs: SpectralCoefficients) -> float:
    """Height drop ``u(0) - u(1)`` across the support, in closed form."""
    c = _coeff_view(params, coeffs)
    return float(np.dot(lambda_all(params) * c, _endpoint_deltas(params)))


def mass(params: BasisParams, coeffs: SpectralCoefficients) -> float:
    """Total integral of the density: only the ``n = 0`` mode contributes.

    Equals ``c_0 * pi^(N/2) Gamma(1-s) / Gamma(N/2+1-s)``, the weighted
    volume of the unit ball.
    """
    c = _coeff_view(params, coeffs)
    half = 0.5 * params.dim
    ball = math.exp(
        half * math.log(math.pi)
        + math.lgamma(1.0 - params.s)
        - math.lgamma(half + 1.0 - params.s)
    )
    return float(c[0]) * ball
