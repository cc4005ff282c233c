"""Command-line front end: solve, sweep, rescale, profile, validate, constants.

Exit codes: 0 success, 1 usage or regime error, 2 nonconvergence (the last
iterate is still written with ``converged: false``), 3 validation failure.
All file output is deterministic: the same arguments produce byte-identical
artifacts (in single-threaded mode for sweeps).
"""

from __future__ import annotations

import argparse
import concurrent.futures
import json
import os
import sys
from typing import Sequence

import numpy as np

from .groundstate import (
    GroundStateSolution,
    from_coefficients,
    mass_scaling,
    rescale,
    supercritical_constant,
    to_steady_state,
)
from .riesz import (
    BasisParams,
    lambda_all,
    mu_all,
    q_all,
    riesz_kernel_constant,
)
from .serialize import (
    atomic_write_text,
    read_solution,
    write_profile_csv,
    write_solution,
)
from .solver import (
    ConvergenceError,
    NoGroundStateError,
    ProblemParams,
    RegimeError,
    solve,
)
from .validation import (
    CheckReport,
    check_boundary_continuity,
    check_far_field_mass,
    check_orthogonality,
    check_pohozaev,
    check_scaling_consistency,
)

__all__ = ["main"]

#: interior profile samples stay below support_radius * (1 - this margin)
_EDGE_MARGIN = 1e-6


class _ArgumentParser(argparse.ArgumentParser):
    """argparse parser whose usage errors exit with code 1, not 2."""

    def error(self, message):
        self.print_usage(sys.stderr)
        print(f"{self.prog}: error: {message}", file=sys.stderr)
        raise SystemExit(1)


def _add_problem_flags(sub, require: bool) -> None:
    sub.add_argument("--dim", type=int, required=require, help="space dimension N")
    sub.add_argument("--s", type=float, required=require, help="fractional order in (0,1)")
    sub.add_argument("--p", type=float, required=require, help="source exponent")
    sub.add_argument("--trunc", type=int, default=64, help="spectral truncation K")
    sub.add_argument("--tol", type=float, default=1e-10, help="residual tolerance")
    sub.add_argument("--dp", type=float, default=0.1, help="continuation step in p")


def _add_sampling_flags(sub) -> None:
    sub.add_argument("--points", type=int, default=400, help="radial sample count")
    sub.add_argument("--rmax", type=float, default=3.0, help="largest sampled radius")


def _build_parser() -> _ArgumentParser:
    parser = _ArgumentParser(
        prog="fracplasma",
        description=(
            "Radially decreasing ground states of the fractional plasma "
            "equation (-Lap)^s u = a (u - C)_+^p, computed in a weighted "
            "Jacobi polynomial basis."
        ),
    )
    commands = parser.add_subparsers(dest="command", required=True)

    sub = commands.add_parser("solve", help="solve one problem and write JSON")
    _add_problem_flags(sub, require=True)
    sub.add_argument("--out", default="solution.json", help="output JSON path")
    sub.add_argument("--plot", action="store_true", help="render a profile figure")
    _add_sampling_flags(sub)

    sub = commands.add_parser("sweep", help="solve over an (s, p) grid")
    sub.add_argument("--dim", type=int, required=True, help="space dimension N")
    sub.add_argument("--s", type=float, help="fixed s when --grid-s is omitted")
    sub.add_argument("--p", type=float, help="fixed p when --grid-p is omitted")
    sub.add_argument("--grid-s", help="comma-separated s values")
    sub.add_argument("--grid-p", help="comma-separated p values")
    sub.add_argument("--trunc", type=int, default=64, help="spectral truncation K")
    sub.add_argument("--tol", type=float, default=1e-10, help="residual tolerance")
    sub.add_argument("--dp", type=float, default=0.1, help="continuation step in p")
    sub.add_argument("--out", default="sweep", help="output directory")
    sub.add_argument(
        "--format",
        choices=("csv", "json"),
        default="csv",
        help="per-point artifact: csv profile or json solution",
    )
    sub.add_argument("--threads", type=int, default=1, help="worker threads")
    sub.add_argument("--plot", action="store_true", help="render an overlay figure")
    _add_sampling_flags(sub)

    sub = commands.add_parser("rescale", help="move along the scaling family")
    sub.add_argument("--in", dest="infile", required=True, help="input solution JSON")
    sub.add_argument("--C", type=float, help="amplitude applied to the profile")
    sub.add_argument("--delta", type=float, help="dilation of the argument")
    sub.add_argument("--mass", type=float, help="target total mass (steady-state mode)")
    sub.add_argument("--out", default="rescaled.json", help="output JSON path")

    sub = commands.add_parser("profile", help="export a radial profile")
    sub.add_argument("--in", dest="infile", help="input solution JSON (else solve inline)")
    _add_problem_flags(sub, require=False)
    _add_sampling_flags(sub)
    sub.add_argument("--out", default="profile.csv", help="output path")
    sub.add_argument("--format", choices=("csv", "json"), default="csv")
    sub.add_argument("--plot", action="store_true", help="render a profile figure")

    sub = commands.add_parser("validate", help="run the check suite on a solution")
    sub.add_argument("--in", dest="infile", help="input solution JSON (else solve inline)")
    _add_problem_flags(sub, require=False)
    sub.add_argument(
        "--basis-only",
        action="store_true",
        help="check orthogonality and boundary continuity only (no solve)",
    )
    sub.add_argument("--probe-r", type=float, default=50.0, help="far-field probe radius")
    sub.add_argument("--out", help="write the JSON report here instead of stdout")

    sub = commands.add_parser("constants", help="print the spectral constants table")
    sub.add_argument("--dim", type=int, required=True, help="space dimension N")
    sub.add_argument("--s", type=float, required=True, help="fractional order in (0,1)")
    sub.add_argument("--p", type=float, help="also print c(N,s,p); needs supercritical p")
    sub.add_argument("--trunc", type=int, default=8, help="largest index in the table")

    return parser


def _problem_params(args) -> ProblemParams:
    basis = BasisParams(dim=args.dim, s=args.s, trunc=args.trunc)
    return ProblemParams(basis=basis, p=args.p, residual_tol=args.tol, dp=args.dp)


def _radial_grid(support_radius: float, points: int, rmax: float) -> np.ndarray:
    """Uniform radii on [0, rmax]; samples just inside the boundary are
    clamped to support_radius*(1 - 1e-6) so the density stays finite."""
    if points < 2:
        raise ValueError(f"--points must be at least 2, got {points}")
    if rmax <= 0.0:
        raise ValueError(f"--rmax must be positive, got {rmax}")
    r = np.linspace(0.0, rmax, points)
    edge = support_radius * (1.0 - _EDGE_MARGIN)
    r[(r > edge) & (r < support_radius)] = edge
    return r


def _profile_columns(sol: GroundStateSolution, points: int, rmax: float):
    r = _radial_grid(sol.support_radius, points, rmax)
    return r, sol.u(r), sol.rho(r)


def _figure_path(out_path: str) -> str:
    return os.path.splitext(out_path)[0] + ".png"


def _render_profile(sol: GroundStateSolution, path: str, points: int, rmax: float) -> None:
    from . import plotting

    r, u, rho = _profile_columns(sol, points, rmax)
    basis = sol.params.basis
    title = f"N={basis.dim}, s={basis.s:g}, p={sol.params.p:g}"
    plotting.render_profile_figure(path, r, u, rho, title=title)


def _load_or_solve(args) -> GroundStateSolution:
    if args.infile:
        return read_solution(args.infile)
    if args.dim is None or args.s is None or args.p is None:
        raise ValueError("give --in FILE, or --dim/--s/--p for an inline solve")
    return solve(_problem_params(args))


def _summary_line(sol: GroundStateSolution) -> str:
    d = sol.diagnostics
    return (
        f"a = {sol.coeffs.a:.15g}  multiplier = {sol.multiplier:.15g}  "
        f"mass = {sol.mass:.15g}  residual = {d.final_residual_inf:.3e}  "
        f"iterations = {d.iterations}"
    )


def cmd_solve(args) -> int:
    params = _problem_params(args)
    try:
        sol = solve(params)
    except ConvergenceError as exc:
        if exc.coeffs is not None and exc.diagnostics is not None:
            partial = from_coefficients(params, exc.coeffs, exc.diagnostics)
            write_solution(args.out, partial)
            print(f"wrote non-converged iterate to {args.out}", file=sys.stderr)
        print(f"fracplasma solve: error: {exc}", file=sys.stderr)
        return 2
    write_solution(args.out, sol)
    print(_summary_line(sol))
    if args.plot:
        _render_profile(sol, _figure_path(args.out), args.points, args.rmax)
    if not sol.diagnostics.converged:
        print(
            f"fracplasma solve: residual {sol.diagnostics.final_residual_inf:.3e} "
            f"did not reach tol {params.residual_tol:g}",
            file=sys.stderr,
        )
        return 2
    return 0


def _parse_grid(text: str, flag: str) -> list[float]:
    try:
        values = [float(tok) for tok in text.split(",") if tok.strip()]
    except ValueError as exc:
        raise ValueError(f"{flag} expects comma-separated numbers: {exc}") from exc
    if not values:
        raise ValueError(f"{flag} is empty")
    return values


def _sweep_point(args, s: float, p: float) -> dict:
    """Solve one grid point and write its artifact; never raises."""
    entry: dict = {"s": s, "p": p, "file": None, "converged": False}
    stem = f"s{s:g}_p{p:g}"
    try:
        basis = BasisParams(dim=args.dim, s=s, trunc=args.trunc)
        params = ProblemParams(basis=basis, p=p, residual_tol=args.tol, dp=args.dp)
        try:
            sol = solve(params)
        except ConvergenceError as exc:
            if exc.coeffs is None or exc.diagnostics is None:
                raise
            sol = from_coefficients(params, exc.coeffs, exc.diagnostics)
            entry["error"] = str(exc)
        if args.format == "json":
            name = stem + ".json"
            write_solution(os.path.join(args.out, name), sol)
        else:
            name = stem + ".csv"
            r, u, rho = _profile_columns(sol, args.points, args.rmax)
            write_profile_csv(os.path.join(args.out, name), r, u, rho)
        entry.update(
            file=name,
            converged=sol.diagnostics.converged,
            a=sol.coeffs.a,
            mass=sol.mass,
            residual_inf=sol.diagnostics.final_residual_inf,
        )
    except (RegimeError, ValueError, ConvergenceError, NoGroundStateError, ArithmeticError) as exc:
        entry["error"] = str(exc)
    return entry


def cmd_sweep(args) -> int:
    if args.grid_s:
        s_values = _parse_grid(args.grid_s, "--grid-s")
    elif args.s is not None:
        s_values = [args.s]
    else:
        s_values = []
    if args.grid_p:
        p_values = _parse_grid(args.grid_p, "--grid-p")
    elif args.p is not None:
        p_values = [args.p]
    else:
        p_values = []
    if not s_values or not p_values:
        raise ValueError("sweep needs a nonempty grid: --grid-s/--s and --grid-p/--p")
    if args.threads < 1:
        raise ValueError(f"--threads must be at least 1, got {args.threads}")
    grid = [(s, p) for s in s_values for p in p_values]
    os.makedirs(args.out, exist_ok=True)
    if args.threads == 1:
        entries = [_sweep_point(args, s, p) for s, p in grid]
    else:
        with concurrent.futures.ThreadPoolExecutor(max_workers=args.threads) as pool:
            entries = list(pool.map(lambda sp: _sweep_point(args, *sp), grid))
    index = {
        "schema": "fracplasma/sweep-1",
        "dim": args.dim,
        "trunc": args.trunc,
        "format": args.format,
        "points": entries,
    }
    atomic_write_text(
        os.path.join(args.out, "index.json"), json.dumps(index, indent=2) + "\n"
    )
    done = sum(1 for e in entries if e["converged"])
    print(f"sweep: {done}/{len(entries)} grid points converged; index in {args.out}/index.json")
    if args.plot:
        _render_sweep_overlay(args, entries)
    return 0 if done == len(entries) else 2


def _render_sweep_overlay(args, entries) -> None:
    from . import plotting

    curves = []
    for entry in entries:
        if not entry["converged"] or entry["file"] is None:
            continue
        path = os.path.join(args.out, entry["file"])
        if entry["file"].endswith(".json"):
            sol = read_solution(path)
            r, _, rho = _profile_columns(sol, args.points, args.rmax)
        else:
            data = np.loadtxt(path, delimiter=",", skiprows=1)
            r, rho = data[:, 0], data[:, 2]
        curves.append((f"s={entry['s']:g}, p={entry['p']:g}", r, rho))
    plotting.render_sweep_figure(
        os.path.join(args.out, "sweep.png"), curves, title=f"N={args.dim}"
    )


def cmd_rescale(args) -> int:
    explicit = args.C is not None or args.delta is not None
    if args.mass is not None and explicit:
        raise ValueError("give either --C with --delta, or --mass, not both")
    if args.mass is None and (args.C is None or args.delta is None):
        raise ValueError("rescale needs both --C and --delta, or --mass")
    sol = read_solution(args.infile)
    if args.mass is not None:
        p = sol.params.p
        chi = (p + 1.0) * sol.coeffs.a ** (1.0 / p)
        view = to_steady_state(sol, chi)
        member = mass_scaling(view, args.mass).solution
    else:
        member = rescale(sol, args.C, args.delta)
    write_solution(args.out, member)
    print(_summary_line(member))
    return 0


def cmd_profile(args) -> int:
    sol = _load_or_solve(args)
    r, u, rho = _profile_columns(sol, args.points, args.rmax)
    if args.format == "csv":
        write_profile_csv(args.out, r, u, rho)
    else:
        payload = {
            "schema": "fracplasma/profile-1",
            "r": [float(v) for v in r],
            "u": [float(v) for v in u],
            "rho": [float(v) for v in rho],
        }
        atomic_write_text(args.out, json.dumps(payload, indent=2) + "\n")
    print(f"wrote {args.points}-point profile to {args.out}")
    if args.plot:
        _render_profile(sol, _figure_path(args.out), args.points, args.rmax)
    return 0


def _report_dict(report: CheckReport) -> dict:
    return {
        "name": report.name,
        "value_left": report.value_left,
        "value_right": report.value_right,
        "relative_error": report.relative_error,
        "tolerance": report.tolerance,
        "passed": report.passed,
    }


def cmd_validate(args) -> int:
    reports: list[CheckReport] = []
    if args.basis_only:
        if args.dim is None or args.s is None:
            raise ValueError("--basis-only needs --dim and --s")
        basis = BasisParams(dim=args.dim, s=args.s, trunc=args.trunc)
        subject = {"dim": basis.dim, "s": basis.s, "trunc": basis.trunc}
        reports.append(check_orthogonality(basis))
        reports.extend(check_boundary_continuity(basis))
    else:
        sol = _load_or_solve(args)
        basis = sol.params.basis
        subject = {
            "dim": basis.dim,
            "s": basis.s,
            "p": sol.params.p,
            "trunc": basis.trunc,
            "support_radius": sol.support_radius,
        }
        reports.append(check_pohozaev(sol))
        reports.append(check_far_field_mass(sol, r_probe=args.probe_r))
        reports.append(check_scaling_consistency(sol, 2.0, 1.5))
        reports.append(check_scaling_consistency(sol, 0.7, 0.8))
        reports.append(check_orthogonality(basis))
        reports.extend(check_boundary_continuity(basis))
    passed = all(r.passed for r in reports)
    payload = {
        "schema": "fracplasma/validate-1",
        "subject": subject,
        "passed": passed,
        "checks": [_report_dict(r) for r in reports],
    }
    text = json.dumps(payload, indent=2) + "\n"
    if args.out:
        atomic_write_text(args.out, text)
        worst = max(reports, key=lambda r: r.relative_error)
        print(
            f"validate: {'all passed' if passed else 'FAILED'} "
            f"({len(reports)} checks, worst {worst.name}: {worst.relative_error:.3e}); "
            f"report in {args.out}"
        )
    else:
        sys.stdout.write(text)
    return 0 if passed else 3


def cmd_constants(args) -> int:
    basis = BasisParams(dim=args.dim, s=args.s, trunc=args.trunc)
    crit = basis.critical_exponent
    if args.p is not None:
        # fail before printing anything so a regime error leaves no output
        c_p = supercritical_constant(args.dim, args.s, args.p)
    lam = lambda_all(basis)
    mu = mu_all(basis)
    q = q_all(basis)
    lines = [
        f"# dim = {args.dim}, s = {args.s:.15g}",
        f"{'n':>4s} {'lambda_n':>22s} {'mu_n':>22s} {'Q_n':>22s}",
    ]
    for n in range(basis.trunc + 1):
        lines.append(f"{n:4d} {lam[n]:22.15g} {mu[n]:22.15g} {q[n]:22.15g}")
    lines.append(f"riesz_kernel_constant  c_{{N,s}} = {riesz_kernel_constant(args.dim, args.s):.15g}")
    lines.append(f"critical_exponent  (N+2s)/(N-2s) = {crit:.15g}")
    lines.append(f"decay_pole_exponent  N/(N-2s) = {args.dim / (args.dim - 2.0 * args.s):.15g}")
    lines.append(f"fair_competition_m  2 - 2s/N = {2.0 - 2.0 * args.s / args.dim:.15g}")
    if args.p is not None:
        lines.append(f"supercritical_constant  c(N,s,p={args.p:g}) = {c_p:.15g}")
    print("\n".join(lines))
    return 0


_COMMANDS = {
    "solve": cmd_solve,
    "sweep": cmd_sweep,
    "rescale": cmd_rescale,
    "profile": cmd_profile,
    "validate": cmd_validate,
    "constants": cmd_constants,
}


def main(argv: Sequence[str] | None = None) -> int:
    parser = _build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    try:
        return _COMMANDS[args.command](args)
    except RegimeError as exc:
        print(f"fracplasma {args.command}: regime error: {exc}", file=sys.stderr)
        return 1
    except (ConvergenceError, NoGroundStateError) as exc:
        print(f"fracplasma {args.command}: error: {exc}", file=sys.stderr)
        return 2
    except (ValueError, OSError) as exc:
        print(f"fracplasma {args.command}: error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
