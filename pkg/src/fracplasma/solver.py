"""Discrete system and solvers for the spectral ground-state problem.

The unknowns are the basis coefficients ``c_0..c_K`` plus the source
strength ``a``.  Projecting the equation onto the basis gives the square
system

    c_k = a / (2^s Q_k) * int (1+t)^(N/2-1) (S(t))_+^p P_k(t) dt,
    1   = sum_n lambda_n c_n (P_n(-1) - P_n(1)),

where ``S(t) = sum_n lambda_n c_n (P_n(t) - P_n(1))`` is the potential
minus its boundary value and the last row normalizes the height drop to 1.
Three solver paths cover the nonlinearity range: a linear eigenproblem at
``p = 1``, a damped Newton iteration with analytic Jacobian for ``p >= 1``,
and a plain fixed-point iteration for ``0 < p < 1``.  ``solve_continuation``
chains Newton solves from ``p = 1`` up to a requested target.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass, replace
from functools import lru_cache
from typing import TYPE_CHECKING

import numpy as np

from .riesz import (
    BasisParams,
    SpectralCoefficients,
    lambda_all,
    q_all,
)
from .specfun import gauss_jacobi_rule, jacobi_at_minus_one, jacobi_at_one, jacobi_table

if TYPE_CHECKING:  # pragma: no cover - import cycle guard, typing only
    from .groundstate import GroundStateSolution

__all__ = [
    "ConvergenceError",
    "NoGroundStateError",
    "NumericsError",
    "ProblemParams",
    "RegimeError",
    "SolveDiagnostics",
    "family_residual",
    "jacobian_system",
    "residual_system",
    "solve",
    "solve_continuation",
    "solve_eigen_p1",
    "solve_fixed_point",
    "solve_newton",
]

log = logging.getLogger(__name__)

_NEWTON_MAX_ITER = 50
_FIXED_POINT_MAX_ITER = 500
_MAX_HALVINGS = 20


class RegimeError(ValueError):
    """Parameters outside the admissible range (e.g. supercritical p)."""


class ConvergenceError(RuntimeError):
    """Iteration failed to reach the residual tolerance.

    Carries the diagnostics and the last iterate so drivers can still write
    a (non-converged) result file.
    """

    def __init__(
        self,
        message: str,
        diagnostics: "SolveDiagnostics | None" = None,
        coeffs: "SpectralCoefficients | None" = None,
    ):
        super().__init__(message)
        self.diagnostics = diagnostics
        self.coeffs = coeffs


class NoGroundStateError(RuntimeError):
    """The linear eigenproblem has no admissible (sign-definite) eigenpair."""


class NumericsError(ArithmeticError):
    """Non-finite intermediate during assembly; carries the offending node."""

    def __init__(self, message: str, node_index: int):
        super().__init__(message)
        self.node_index = node_index


@dataclass(frozen=True)
class ProblemParams:
    """Nonlinearity and numerical controls on top of a :class:`BasisParams`.

    Parameters
    ----------
    basis : BasisParams
        Dimension, fractional order and truncation.
    p : float
        Nonlinearity exponent; ``p > 0``, and ``p < (N+2s)/(N-2s)`` whenever
        ``p >= 1`` (the subcritical regime where ground states exist).
    residual_tol : float
        Convergence threshold on the residual infinity norm.
    max_iter : int or None
        Iteration cap; ``None`` selects 500 for the fixed-point path and 50
        for Newton.
    dp : float
        Continuation step in ``p``.
    quad_order : int or None
        Gauss-Jacobi node count; ``None`` selects ``max(2K + 32, 64)``.
    """

    basis: BasisParams
    p: float
    residual_tol: float = 1e-10
    max_iter: int | None = None
    dp: float = 0.1
    quad_order: int | None = None

    def __post_init__(self):
        if not (np.isfinite(self.p) and self.p > 0.0):
            raise RegimeError(f"p must be positive and finite, got {self.p}")
        crit = self.basis.critical_exponent
        if self.p >= 1.0 and self.p >= crit:
            raise RegimeError(
                f"p >= (N+2s)/(N-2s) = {crit:.12g} is supercritical for "
                f"dim={self.basis.dim}, s={self.basis.s}; no compactly supported "
                "ground state exists"
            )
        if not (np.isfinite(self.residual_tol) and self.residual_tol > 0.0):
            raise ValueError(f"residual_tol must be positive, got {self.residual_tol}")
        if self.max_iter is not None and self.max_iter < 1:
            raise ValueError(f"max_iter must be >= 1, got {self.max_iter}")
        if not (np.isfinite(self.dp) and self.dp > 0.0):
            raise ValueError(f"dp must be positive, got {self.dp}")
        if self.quad_order is not None and self.quad_order < self.basis.trunc + 1:
            raise ValueError(
                f"quad_order must be at least trunc + 1 = {self.basis.trunc + 1}"
            )

    @property
    def resolved_quad_order(self) -> int:
        if self.quad_order is not None:
            return self.quad_order
        return max(2 * self.basis.trunc + 32, 64)

    def iter_cap(self, default: int) -> int:
        return self.max_iter if self.max_iter is not None else default


@dataclass
class SolveDiagnostics:
    """Iteration record attached to every solve."""

    iterations: int
    final_residual_inf: float
    tail_ratio: float
    converged: bool
    continuation_path: tuple[tuple[float, float], ...] = ()
    residual_history: tuple[float, ...] = ()

    def __post_init__(self):
        self.continuation_path = tuple(
            (float(p), float(r)) for p, r in self.continuation_path
        )
        self.residual_history = tuple(float(r) for r in self.residual_history)


@dataclass(frozen=True)
class _Workspace:
    """Quadrature rule and basis tables shared by all assembly routines."""

    nodes: np.ndarray
    weights: np.ndarray
    pmat: np.ndarray  # (K+1, M) Jacobi values at the nodes
    wp: np.ndarray  # weights * pmat, ready for projections
    ld: np.ndarray  # lambda_n * (P_n(t) - P_n(1)), rows n
    lam: np.ndarray
    inv2sq: np.ndarray  # 1 / (2^s Q_k)
    osc_row: np.ndarray  # lambda_n * (P_n(-1) - P_n(1))


@lru_cache(maxsize=64)
def _workspace(basis: BasisParams, quad_order: int) -> _Workspace:
    rule = gauss_jacobi_rule(0.0, basis.jacobi_beta, quad_order)
    pmat = jacobi_table(basis.trunc, basis.jacobi_alpha, basis.jacobi_beta, rule.nodes)
    p_one = np.array([jacobi_at_one(n, basis.jacobi_alpha) for n in range(basis.trunc + 1)])
    p_minus = np.array(
        [jacobi_at_minus_one(n, basis.jacobi_beta) for n in range(basis.trunc + 1)]
    )
    lam = lambda_all(basis)
    inv2sq = 1.0 / (2.0 ** basis.s * q_all(basis))
    ws = _Workspace(
        nodes=rule.nodes,
        weights=rule.weights,
        pmat=pmat,
        wp=rule.weights[None, :] * pmat,
        ld=lam[:, None] * (pmat - p_one[:, None]),
        lam=lam,
        inv2sq=inv2sq,
        osc_row=lam * (p_minus - p_one),
    )
    for arr in (ws.nodes, ws.weights, ws.pmat, ws.wp, ws.ld, ws.lam, ws.inv2sq, ws.osc_row):
        arr.flags.writeable = False
    return ws


def _source_projection(ws: _Workspace, c: np.ndarray, p: float) -> tuple[np.ndarray, np.ndarray]:
    """Clamped source at the nodes and its basis projection ``F / a``."""
    svals = c @ ws.ld
    clamped = np.where(svals > 0.0, svals, 0.0)
    powed = clamped**p
    if not np.all(np.isfinite(powed)):
        bad = int(np.flatnonzero(~np.isfinite(powed))[0])
        raise NumericsError(
            f"non-finite source value at quadrature node {bad}", node_index=bad
        )
    return powed, ws.inv2sq * (ws.wp @ powed)


def residual_system(params: ProblemParams, coeffs: SpectralCoefficients) -> np.ndarray:
    """Residual of the projected system; entries ``0..K`` are ``c_k - F_k``.

    The last entry is ``1 - (u(0) - u(1))``, the normalization defect.
    """
    ws = _workspace(params.basis, params.resolved_quad_order)
    c = coeffs.c
    if c.size != params.basis.trunc + 1:
        raise ValueError(
            f"coefficient length {c.size} does not match trunc + 1 = {params.basis.trunc + 1}"
        )
    _, proj = _source_projection(ws, c, params.p)
    res = np.empty(c.size + 1)
    res[:-1] = c - coeffs.a * proj
    res[-1] = 1.0 - float(ws.osc_row @ c)
    return res


def jacobian_system(params: ProblemParams, coeffs: SpectralCoefficients) -> np.ndarray:
    """Analytic Jacobian of :func:`residual_system` in ``(c_0..c_K, a)``.

    Only defined for ``p >= 1``; the clamp derivative is taken as zero on the
    inactive set ``S <= 0``.
    """
    if params.p < 1.0:
        raise ValueError(f"jacobian_system requires p >= 1, got {params.p}")
    ws = _workspace(params.basis, params.resolved_quad_order)
    c = coeffs.c
    n = c.size
    svals = c @ ws.ld
    positive = svals > 0.0
    safe = np.where(positive, svals, 1.0)
    wgt = np.where(positive, params.p * safe ** (params.p - 1.0), 0.0)
    _, proj = _source_projection(ws, c, params.p)
    block = coeffs.a * ws.inv2sq[:, None] * ((ws.wp * wgt[None, :]) @ ws.ld.T)
    jac = np.zeros((n + 1, n + 1))
    jac[:n, :n] = np.eye(n) - block
    jac[:n, n] = -proj
    jac[n, :n] = -ws.osc_row
    return jac


def family_residual(
    params: ProblemParams, coeffs: SpectralCoefficients, support_radius: float = 1.0
) -> np.ndarray:
    """Projected-equation residual for a scaled family member, frame-relative.

    A solution scaled by ``u -> gamma * u(delta .)`` has support radius
    ``R = 1/delta``, coefficients multiplied by ``sigma = gamma delta^(2s)``
    and effective source strength ``a R^(2sp)``.  The rows are divided by
    ``sigma`` (recovered as the oscillation of the scaled coefficients) so
    that the result coincides with the first ``K+1`` entries of
    :func:`residual_system` for the normalized solution, up to rounding.
    """
    if support_radius <= 0.0:
        raise ValueError(f"support_radius must be positive, got {support_radius}")
    ws = _workspace(params.basis, params.resolved_quad_order)
    c = coeffs.c
    sigma = float(ws.osc_row @ c)
    if sigma <= 0.0:
        raise ValueError(f"scaled oscillation must be positive, got {sigma}")
    a_eff = coeffs.a * support_radius ** (2.0 * params.basis.s * params.p)
    _, proj = _source_projection(ws, c, params.p)
    return (c - a_eff * proj) / sigma


def _diagnostics(
    coeffs: SpectralCoefficients,
    iterations: int,
    residual: float,
    tol: float,
    history: list[float],
    path: list[tuple[float, float]],
) -> SolveDiagnostics:
    return SolveDiagnostics(
        iterations=iterations,
        final_residual_inf=residual,
        tail_ratio=coeffs.tail_ratio,
        converged=residual <= tol,
        continuation_path=path,
        residual_history=history,
    )


def solve_eigen_p1(params: ProblemParams) -> tuple[SpectralCoefficients, SolveDiagnostics]:
    """Ground state at ``p = 1`` via the linear eigenproblem ``A c = c / a``.

    Selects the eigenpair with the largest real positive eigenvalue whose
    eigenvector gives a sign-definite density on the quadrature nodes, then
    rescales the eigenvector to unit height drop.

    Raises
    ------
    NoGroundStateError
        If no admissible eigenpair exists.
    """
    if params.basis.trunc < 1:
        raise ValueError("the normalized system needs trunc >= 1")
    ws = _workspace(params.basis, params.resolved_quad_order)
    amat = ws.inv2sq[:, None] * (ws.wp @ ws.ld.T)
    eigvals, eigvecs = np.linalg.eig(amat)
    order = np.argsort(-eigvals.real)
    scale = float(np.max(np.abs(eigvals.real))) or 1.0
    for idx in order:
        theta = eigvals[idx]
        if abs(theta.imag) > 1e-12 * scale or theta.real <= 0.0:
            continue
        vec = eigvecs[:, idx]
        if np.max(np.abs(vec.imag)) > 1e-10 * np.max(np.abs(vec.real)):
            continue
        v = vec.real
        dens = v @ ws.pmat
        peak = float(np.max(np.abs(dens)))
        if peak == 0.0:
            continue
        if dens[int(np.argmax(np.abs(dens)))] < 0.0:
            v = -v
            dens = -dens
        # the principal eigenvector undershoots zero by O(1e-5) relative at
        # small truncations, while sign-changing spurious modes swing to -0.3
        # and beyond; 1e-3 separates the two by orders of magnitude each way
        if float(np.min(dens)) < -1e-3 * peak:
            continue
        osc = float(ws.osc_row @ v)
        if osc <= 0.0:
            continue
        coeffs = SpectralCoefficients(c=v / osc, a=1.0 / float(theta.real))
        p1 = params if params.p == 1.0 else replace(params, p=1.0)
        res = float(np.max(np.abs(residual_system(p1, coeffs))))
        log.debug("eigen solve: a = %.12g, residual = %.3e", coeffs.a, res)
        diag = _diagnostics(coeffs, 1, res, params.residual_tol, [res], [(1.0, res)])
        return coeffs, diag
    raise NoGroundStateError(
        "no admissible eigenpair: every candidate eigenvector changes sign"
    )


def solve_fixed_point(
    params: ProblemParams, init: SpectralCoefficients | None = None
) -> tuple[SpectralCoefficients, SolveDiagnostics]:
    """Normalized fixed-point iteration for the sublinear range ``0 < p < 1``.

    Each sweep maps ``c`` through the projected source, rescales the iterate
    to unit height drop and divides ``a`` by the same factor, so every
    iterate satisfies the normalization row exactly.

    Raises
    ------
    RegimeError
        If ``p >= 1`` (the iteration is only a contraction below 1).
    ConvergenceError
        If the tolerance is not met within the iteration cap.
    """
    if params.p >= 1.0:
        raise RegimeError(
            f"fixed-point path requires 0 < p < 1, got p = {params.p}; "
            "use the Newton/continuation path instead"
        )
    if params.basis.trunc < 1:
        raise ValueError("the normalized system needs trunc >= 1")
    ws = _workspace(params.basis, params.resolved_quad_order)
    if init is None:
        c = np.zeros(params.basis.trunc + 1)
        c[1] = 1.0 / ws.osc_row[1]
        a = 1.0
    else:
        osc0 = float(ws.osc_row @ init.c)
        if osc0 <= 0.0:
            raise ValueError("initial guess must have positive height drop")
        c = init.c / osc0
        a = init.a / osc0
    cap = params.iter_cap(_FIXED_POINT_MAX_ITER)
    history: list[float] = []
    for it in range(cap):
        _, proj = _source_projection(ws, c, params.p)
        res = float(np.max(np.abs(c - a * proj)))
        history.append(res)
        if res <= params.residual_tol:
            coeffs = SpectralCoefficients(c=c, a=a)
            diag = _diagnostics(coeffs, it, res, params.residual_tol, history, [(params.p, res)])
            log.debug("fixed point converged after %d sweeps, residual %.3e", it, res)
            return coeffs, diag
        cnew = a * proj
        osc = float(ws.osc_row @ cnew)
        if not (np.isfinite(osc) and osc > 0.0):
            bad = SpectralCoefficients(c=c, a=a)
            raise ConvergenceError(
                f"fixed-point iterate degenerated (height drop {osc}) at sweep {it}",
                _diagnostics(bad, it, res, params.residual_tol, history, []),
                coeffs=bad,
            )
        c = cnew / osc
        a = a / osc
    coeffs = SpectralCoefficients(c=c, a=a)
    raise ConvergenceError(
        f"fixed point did not reach tol {params.residual_tol:g} in {cap} sweeps "
        f"(residual {history[-1]:.3e})",
        _diagnostics(coeffs, cap, history[-1], params.residual_tol, history, []),
        coeffs=coeffs,
    )


def solve_newton(
    params: ProblemParams, init: SpectralCoefficients
) -> tuple[SpectralCoefficients, SolveDiagnostics]:
    """Damped Newton iteration on the full system, for ``p >= 1``.

    Steps are halved (at most 20 times) until the residual norm decreases;
    trial states with nonpositive ``a`` are rejected the same way.

    Raises
    ------
    ConvergenceError
        On a singular Jacobian, a stalled line search, or iteration cap.
    """
    if params.p < 1.0:
        raise RegimeError(
            f"Newton path requires p >= 1, got p = {params.p}; "
            "use the fixed-point path instead"
        )
    x = np.append(init.c, init.a)
    cap = params.iter_cap(_NEWTON_MAX_ITER)
    history: list[float] = []

    def unpack(vec: np.ndarray) -> SpectralCoefficients:
        return SpectralCoefficients(c=vec[:-1], a=float(vec[-1]))

    coeffs = unpack(x)
    res = residual_system(params, coeffs)
    rnorm = float(np.max(np.abs(res)))
    history.append(rnorm)
    for it in range(1, cap + 1):
        if rnorm <= params.residual_tol:
            diag = _diagnostics(
                coeffs, it - 1, rnorm, params.residual_tol, history, [(params.p, rnorm)]
            )
            return coeffs, diag
        jac = jacobian_system(params, coeffs)
        try:
            step = np.linalg.solve(jac, res)
        except np.linalg.LinAlgError as exc:
            raise ConvergenceError(
                f"singular Jacobian at iteration {it}",
                _diagnostics(coeffs, it, rnorm, params.residual_tol, history, []),
                coeffs=coeffs,
            ) from exc
        damping = 1.0
        for _ in range(_MAX_HALVINGS):
            trial = x - damping * step
            if trial[-1] > 0.0:
                trial_coeffs = unpack(trial)
                trial_res = residual_system(params, trial_coeffs)
                trial_norm = float(np.max(np.abs(trial_res)))
                if trial_norm < rnorm:
                    break
            damping *= 0.5
        else:
            raise ConvergenceError(
                f"line search stalled at iteration {it} (residual {rnorm:.3e})",
                _diagnostics(coeffs, it, rnorm, params.residual_tol, history, []),
                coeffs=coeffs,
            )
        x, coeffs, res, rnorm = trial, trial_coeffs, trial_res, trial_norm
        history.append(rnorm)
    if rnorm <= params.residual_tol:
        diag = _diagnostics(coeffs, cap, rnorm, params.residual_tol, history, [(params.p, rnorm)])
        return coeffs, diag
    raise ConvergenceError(
        f"Newton did not reach tol {params.residual_tol:g} in {cap} iterations "
        f"(residual {rnorm:.3e})",
        _diagnostics(coeffs, cap, rnorm, params.residual_tol, history, []),
        coeffs=coeffs,
    )


def solve_continuation(
    params: ProblemParams, p_target: float
) -> tuple["GroundStateSolution", SolveDiagnostics]:
    """March the ground state from ``p = 1`` to ``p_target`` in steps of ``dp``.

    Starts from the eigen solve, warm-starts a Newton solve at each
    increment, and halves the step (down to ``dp/16``) when Newton fails.

    Returns the packaged solution together with the accumulated diagnostics;
    ``continuation_path`` records one ``(p, residual)`` pair per accepted
    stop.
    """
    from .groundstate import from_coefficients

    if p_target < 1.0:
        raise RegimeError(f"continuation starts at p = 1; got target {p_target}")
    crit = params.basis.critical_exponent
    if p_target >= crit:
        raise RegimeError(
            f"p >= (N+2s)/(N-2s) = {crit:.12g} is supercritical for "
            f"dim={params.basis.dim}, s={params.basis.s}"
        )
    coeffs, diag = solve_eigen_p1(replace(params, p=1.0))
    path = list(diag.continuation_path)
    history = list(diag.residual_history)
    iterations = diag.iterations
    current_p = 1.0
    step = params.dp
    while current_p < p_target - 1e-12:
        trial_p = min(current_p + step, p_target)
        try:
            coeffs_new, d = solve_newton(replace(params, p=trial_p), coeffs)
        except ConvergenceError as exc:
            if step <= params.dp / 16.0 + 1e-15:
                raise ConvergenceError(
                    f"continuation stalled at p = {current_p:.6g} (step {step:.3g}): {exc}",
                    _diagnostics(
                        coeffs,
                        iterations,
                        history[-1] if history else float("nan"),
                        params.residual_tol,
                        history,
                        path,
                    ),
                    coeffs=coeffs,
                ) from exc
            step *= 0.5
            log.debug("continuation step halved to %.4g at p = %.6g", step, current_p)
            continue
        coeffs = coeffs_new
        current_p = trial_p
        iterations += d.iterations
        history.extend(d.residual_history)
        path.append((trial_p, d.final_residual_inf))
        step = params.dp
    final_params = params if params.p == p_target else replace(params, p=p_target)
    final_res = float(np.max(np.abs(residual_system(final_params, coeffs))))
    diag = SolveDiagnostics(
        iterations=iterations,
        final_residual_inf=final_res,
        tail_ratio=coeffs.tail_ratio,
        converged=final_res <= params.residual_tol,
        continuation_path=path,
        residual_history=history,
    )
    return from_coefficients(final_params, coeffs, diag), diag


def solve(params: ProblemParams) -> "GroundStateSolution":
    """Solve for the normalized ground state, choosing the path from ``p``.

    ``p < 1`` runs the fixed-point sweep, ``p = 1`` the linear eigensolve,
    and ``p > 1`` continuation in ``p`` from the eigensolve.
    """
    from .groundstate import from_coefficients

    if params.p > 1.0:
        sol, _ = solve_continuation(params, params.p)
        return sol
    if params.p == 1.0:
        coeffs, diag = solve_eigen_p1(params)
    else:
        coeffs, diag = solve_fixed_point(params)
    return from_coefficients(params, coeffs, diag)
