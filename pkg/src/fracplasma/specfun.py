"""Log-space gamma utilities, Jacobi polynomials, Gauss-Jacobi quadrature and 2F1.

Everything downstream (basis constants, solver assembly, far-field evaluation)
reduces to the primitives in this module.  Gamma-function ratios are always
formed in log space so that large orders or truncation levels never overflow.
The Gauss hypergeometric function is evaluated by direct series summation for
small argument and by the z -> 1-z linear transformation close to the
convergence boundary.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass

import numpy as np
from scipy.linalg import eigh_tridiagonal

__all__ = [
    "QuadratureRule",
    "beta_fn",
    "gauss_jacobi_rule",
    "gauss_sum_at_one",
    "hyp2f1",
    "jacobi_at_minus_one",
    "jacobi_at_one",
    "jacobi_p",
    "jacobi_table",
    "ln_gamma",
]

#: series controls for hyp2f1 (relative cutoff, hard term cap)
_SERIES_RTOL = 1e-16
_SERIES_MAX_TERMS = 5000
#: switch point between direct series and the 1-z transformation
_SERIES_Z_MAX = 0.9


def ln_gamma(x: float) -> float:
    """Natural log of the Gamma function for positive real ``x``.

    Parameters
    ----------
    x : float
        Strictly positive argument.

    Returns
    -------
    float
        ``log(Gamma(x))``.

    Raises
    ------
    ValueError
        If ``x <= 0``.
    """
    if x <= 0.0:
        raise ValueError(f"ln_gamma requires x > 0, got {x}")
    return math.lgamma(x)


def _ln_gamma_signed(x: float) -> tuple[float, float]:
    """``(log|Gamma(x)|, sign)`` for any non-pole real argument."""
    if x > 0.0:
        return math.lgamma(x), 1.0
    if x == math.floor(x):
        raise ValueError(f"Gamma pole at nonpositive integer {x}")
    sign = 1.0 if int(math.floor(x)) % 2 == 0 else -1.0
    return math.lgamma(x), sign


def beta_fn(p: float, q: float) -> float:
    """Euler beta function ``B(p, q)`` for positive arguments, via log-gammas."""
    if p <= 0.0 or q <= 0.0:
        raise ValueError(f"beta_fn requires positive arguments, got ({p}, {q})")
    return math.exp(math.lgamma(p) + math.lgamma(q) - math.lgamma(p + q))


def jacobi_table(nmax: int, alpha: float, beta: float, t: np.ndarray) -> np.ndarray:
    """Jacobi polynomials ``P_n^(alpha,beta)(t)`` for all ``n = 0..nmax``.

    Uses the standard three-term recurrence, which is stable for the
    parameter ranges used here (``alpha > -1``, ``beta > -1``).

    Parameters
    ----------
    nmax : int
        Highest degree (inclusive), ``nmax >= 0``.
    alpha, beta : float
        Jacobi parameters, each ``> -1``.
    t : numpy.ndarray
        Evaluation points in ``[-1, 1]`` (values outside are not rejected;
        the recurrence extends polynomially).

    Returns
    -------
    numpy.ndarray
        Array of shape ``(nmax + 1, t.size)``; row ``n`` holds ``P_n(t)``.
    """
    if nmax < 0:
        raise ValueError(f"nmax must be >= 0, got {nmax}")
    if alpha <= -1.0 or beta <= -1.0:
        raise ValueError(f"Jacobi parameters must exceed -1, got ({alpha}, {beta})")
    t = np.atleast_1d(np.asarray(t, dtype=float))
    out = np.empty((nmax + 1, t.size))
    out[0] = 1.0
    if nmax == 0:
        return out
    ab = alpha + beta
    out[1] = 0.5 * (alpha - beta) + 0.5 * (ab + 2.0) * t
    for n in range(1, nmax):
        c0 = 2.0 * (n + 1.0) * (n + ab + 1.0) * (2.0 * n + ab)
        c1 = (2.0 * n + ab + 1.0) * (alpha * alpha - beta * beta)
        c2 = (2.0 * n + ab) * (2.0 * n + ab + 1.0) * (2.0 * n + ab + 2.0)
        c3 = 2.0 * (n + alpha) * (n + beta) * (2.0 * n + ab + 2.0)
        out[n + 1] = ((c1 + c2 * t) * out[n] - c3 * out[n - 1]) / c0
    return out


def jacobi_p(n: int, alpha: float, beta: float, t):
    """Single Jacobi polynomial ``P_n^(alpha,beta)`` at scalar or array ``t``."""
    scalar = np.isscalar(t)
    vals = jacobi_table(n, alpha, beta, np.atleast_1d(t))[n]
    return float(vals[0]) if scalar else vals


def jacobi_at_one(n: int, alpha: float) -> float:
    """Endpoint value ``P_n^(alpha,beta)(1) = Gamma(n+alpha+1)/(n! Gamma(alpha+1))``."""
    if n < 0:
        raise ValueError(f"degree must be >= 0, got {n}")
    if alpha <= -1.0:
        raise ValueError(f"alpha must exceed -1, got {alpha}")
    return math.exp(
        math.lgamma(n + alpha + 1.0) - math.lgamma(n + 1.0) - math.lgamma(alpha + 1.0)
    )


def jacobi_at_minus_one(n: int, beta: float) -> float:
    """Endpoint value ``P_n^(alpha,beta)(-1) = (-1)^n Gamma(n+beta+1)/(n! Gamma(beta+1))``."""
    sign = -1.0 if n % 2 else 1.0
    return sign * jacobi_at_one(n, beta)


@dataclass(frozen=True)
class QuadratureRule:
    """Gauss-Jacobi rule for the weight ``(1-t)^alpha (1+t)^beta`` on ``[-1, 1]``.

    ``sum(weights * f(nodes))`` integrates ``w(t) f(t)`` exactly for
    polynomials ``f`` of degree ``<= 2*order - 1``.
    """

    alpha: float
    beta: float
    order: int
    nodes: np.ndarray
    weights: np.ndarray

    def integrate(self, values: np.ndarray) -> float:
        """Weighted sum of integrand values sampled at ``nodes``."""
        return float(np.dot(self.weights, values))


def gauss_jacobi_rule(alpha: float, beta: float, order: int) -> QuadratureRule:
    """Golub-Welsch construction of the ``order``-point Gauss-Jacobi rule.

    Nodes are the eigenvalues of the symmetrized Jacobi recurrence matrix;
    weights come from the first components of the eigenvectors scaled by the
    total weight mass ``2^(alpha+beta+1) B(alpha+1, beta+1)``.

    Parameters
    ----------
    alpha, beta : float
        Weight exponents, each ``> -1``.
    order : int
        Number of nodes, ``>= 1``.

    Returns
    -------
    QuadratureRule
        Nodes ascending in ``(-1, 1)``, all weights positive.
    """
    if order < 1:
        raise ValueError(f"order must be >= 1, got {order}")
    if alpha <= -1.0 or beta <= -1.0:
        raise ValueError(f"weight exponents must exceed -1, got ({alpha}, {beta})")
    ab = alpha + beta
    diag = np.empty(order)
    diag[0] = (beta - alpha) / (ab + 2.0)
    if order > 1:
        k = np.arange(1, order, dtype=float)
        diag[1:] = (beta * beta - alpha * alpha) / ((2.0 * k + ab) * (2.0 * k + ab + 2.0))
    off = np.empty(max(order - 1, 0))
    if order > 1:
        # k = 1 written with the (k+ab)/(2k+ab-1) factor cancelled to stay
        # finite as alpha + beta -> -1
        off[0] = math.sqrt(
            4.0 * (1.0 + alpha) * (1.0 + beta) / ((2.0 + ab) ** 2 * (3.0 + ab))
        )
    if order > 2:
        k = np.arange(2, order, dtype=float)
        num = 4.0 * k * (k + alpha) * (k + beta) * (k + ab)
        den = (2.0 * k + ab) ** 2 * (2.0 * k + ab + 1.0) * (2.0 * k + ab - 1.0)
        off[1:] = np.sqrt(num / den)
    mu0 = math.exp(
        (ab + 1.0) * math.log(2.0)
        + math.lgamma(alpha + 1.0)
        + math.lgamma(beta + 1.0)
        - math.lgamma(ab + 2.0)
    )
    if order == 1:
        nodes = diag.copy()
        weights = np.array([mu0])
    else:
        nodes, vecs = eigh_tridiagonal(diag, off)
        weights = mu0 * vecs[0] ** 2
    return QuadratureRule(alpha=alpha, beta=beta, order=order, nodes=nodes, weights=weights)


def _gauss_series(a: float, b: float, c: float, z: float) -> float:
    """Direct Gauss series for 2F1; assumes it converges at ``z``."""
    term = 1.0
    total = 1.0
    for j in range(_SERIES_MAX_TERMS):
        term *= (a + j) * (b + j) / ((c + j) * (1.0 + j)) * z
        total += term
        if abs(term) <= _SERIES_RTOL * abs(total):
            return total
    warnings.warn(
        f"2F1 series hit {_SERIES_MAX_TERMS} terms at z={z}; result may be inaccurate",
        RuntimeWarning,
        stacklevel=3,
    )
    return total


def gauss_sum_at_one(a: float, b: float, c: float) -> float:
    """Value of ``2F1(a, b; c; 1)`` by Gauss summation; needs ``c - a - b > 0``."""
    if c - a - b <= 0.0:
        raise ValueError(f"Gauss summation needs c - a - b > 0, got {c - a - b}")
    l_num, s_num = _ln_gamma_signed(c)
    l1, s1 = _ln_gamma_signed(c - a - b)
    l2, s2 = _ln_gamma_signed(c - a)
    l3, s3 = _ln_gamma_signed(c - b)
    return s_num * s1 * s2 * s3 * math.exp(l_num + l1 - l2 - l3)


def hyp2f1(a: float, b: float, c: float, z: float) -> float:
    """Gauss hypergeometric function ``2F1(a, b; c; z)`` on ``0 <= z < 1``.

    Direct series below ``z = 0.9``; above it, the standard linear
    transformation in ``1 - z`` (two series plus gamma-ratio prefactors),
    which is valid whenever ``c - a - b`` is not an integer.

    Parameters
    ----------
    a, b, c : float
        Parameters; ``c`` must not be a nonpositive integer.
    z : float
        Argument in ``[0, 1)``.

    Returns
    -------
    float

    Raises
    ------
    ValueError
        If ``z`` is outside ``[0, 1)``, ``c`` is a nonpositive integer, or
        the transformation branch is requested with integer ``c - a - b``.
    """
    if not 0.0 <= z < 1.0:
        raise ValueError(f"hyp2f1 argument must satisfy 0 <= z < 1, got {z}")
    if c <= 0.0 and c == math.floor(c):
        raise ValueError(f"c must not be a nonpositive integer, got {c}")
    if z == 0.0:
        return 1.0
    if z <= _SERIES_Z_MAX:
        return _gauss_series(a, b, c, z)
    cab = c - a - b
    if abs(cab - round(cab)) < 1e-9:
        raise ValueError(
            f"1-z transformation needs non-integer c-a-b, got {cab}; "
            "argument reduction is not supported in the logarithmic case"
        )
    lc, sc = _ln_gamma_signed(c)
    w = 1.0 - z
    # 2F1(a,b;c;z) = G1 * 2F1(a,b;a+b-c+1;w) + G2 * w^(c-a-b) * 2F1(c-a,c-b;c-a-b+1;w)
    l1, s1 = _ln_gamma_signed(cab)
    l2, s2 = _ln_gamma_signed(c - a)
    l3, s3 = _ln_gamma_signed(c - b)
    g1 = sc * s1 * s2 * s3 * math.exp(lc + l1 - l2 - l3)
    l4, s4 = _ln_gamma_signed(-cab)
    l5, s5 = _ln_gamma_signed(a)
    l6, s6 = _ln_gamma_signed(b)
    g2 = sc * s4 * s5 * s6 * math.exp(lc + l4 - l5 - l6)
    f1 = _gauss_series(a, b, a + b - c + 1.0, w)
    f2 = _gauss_series(c - a, c - b, cab + 1.0, w)
    return g1 * f1 + g2 * math.pow(w, cab) * f2
