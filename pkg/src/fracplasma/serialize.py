"""JSON and CSV artifacts for ground-state solutions.

The JSON layout is versioned under the ``schema`` key so old result files
stay readable; derived quantities (multiplier, mass, central value) are
recomputed from the stored coefficients on load rather than trusted.  CSV
profiles use 17 significant digits so doubles round-trip exactly.  All
writers go through a temp-file + rename so readers never see a partial
file.
"""

from __future__ import annotations

import json
import os
import tempfile
from typing import Any

import numpy as np

from .groundstate import GroundStateSolution, from_coefficients
from .riesz import BasisParams, SpectralCoefficients
from .solver import ProblemParams, SolveDiagnostics

__all__ = [
    "SCHEMA_TAG",
    "atomic_write_text",
    "read_solution",
    "solution_from_dict",
    "solution_to_dict",
    "write_profile_csv",
    "write_solution",
]

SCHEMA_TAG = "fracplasma/1"


def _fmt(x: float) -> str:
    """Render a float with 17 significant digits (lossless round trip)."""
    return format(float(x), ".17g")


def atomic_write_text(path: str, text: str) -> None:
    """Write ``text`` to ``path`` via a temp file + rename in one directory."""
    directory = os.path.dirname(os.path.abspath(path))
    os.makedirs(directory, exist_ok=True)
    fd, tmp = tempfile.mkstemp(dir=directory, prefix=".tmp-", suffix="~")
    try:
        with os.fdopen(fd, "w", newline="") as handle:
            handle.write(text)
        os.replace(tmp, path)
    except BaseException:
        try:
            os.unlink(tmp)
        except OSError:
            pass
        raise


def solution_to_dict(sol: GroundStateSolution) -> dict[str, Any]:
    """Serialize a solution to the versioned result dictionary."""
    params = sol.params
    diag = sol.diagnostics
    return {
        "schema": SCHEMA_TAG,
        "params": {
            "dim": params.basis.dim,
            "s": params.basis.s,
            "p": params.p,
            "trunc": params.basis.trunc,
            "tol": params.residual_tol,
            "dp": params.dp,
        },
        "coefficients": [float(c) for c in sol.coeffs.c],
        "a": float(sol.coeffs.a),
        "multiplier_C": float(sol.multiplier),
        "mass": float(sol.mass),
        "central_value": float(sol.central_value),
        "support_radius": float(sol.support_radius),
        "diagnostics": {
            "iterations": diag.iterations,
            "residual_inf": diag.final_residual_inf,
            "tail_ratio": diag.tail_ratio,
            "converged": diag.converged,
            "continuation_path": [
                [float(p), float(res)] for p, res in diag.continuation_path
            ],
        },
    }


def solution_from_dict(data: dict[str, Any]) -> GroundStateSolution:
    """Rebuild a solution from its result dictionary.

    The multiplier, mass and central value are recomputed from the stored
    coefficients and support radius, so hand-edited derived fields cannot
    produce an inconsistent object.
    """
    if not isinstance(data, dict):
        raise ValueError("result document must be a JSON object")
    tag = data.get("schema")
    if tag != SCHEMA_TAG:
        raise ValueError(f"unsupported schema {tag!r}; expected {SCHEMA_TAG!r}")
    try:
        raw = data["params"]
        basis = BasisParams(
            dim=int(raw["dim"]), s=float(raw["s"]), trunc=int(raw["trunc"])
        )
        params = ProblemParams(
            basis=basis,
            p=float(raw["p"]),
            residual_tol=float(raw["tol"]),
            dp=float(raw["dp"]),
        )
        coeffs = SpectralCoefficients(
            c=np.asarray(data["coefficients"], dtype=float), a=float(data["a"])
        )
        diag_raw = data["diagnostics"]
        diagnostics = SolveDiagnostics(
            iterations=int(diag_raw["iterations"]),
            final_residual_inf=float(diag_raw["residual_inf"]),
            tail_ratio=float(diag_raw["tail_ratio"]),
            converged=bool(diag_raw["converged"]),
            continuation_path=tuple(
                (float(p), float(res))
                for p, res in diag_raw.get("continuation_path", ())
            ),
            residual_history=(),
        )
        support_radius = float(data["support_radius"])
    except (KeyError, TypeError) as exc:
        raise ValueError(f"malformed result document: {exc}") from exc
    if coeffs.c.size != basis.trunc + 1:
        raise ValueError(
            f"coefficient count {coeffs.c.size} does not match trunc={basis.trunc}"
        )
    return from_coefficients(params, coeffs, diagnostics, support_radius)


def write_solution(path: str, sol: GroundStateSolution) -> None:
    """Write a solution's JSON artifact atomically."""
    text = json.dumps(solution_to_dict(sol), indent=2, sort_keys=False) + "\n"
    atomic_write_text(path, text)


def read_solution(path: str) -> GroundStateSolution:
    """Load a JSON artifact back into a solution."""
    with open(path, encoding="utf-8") as handle:
        data = json.load(handle)
    return solution_from_dict(data)


def write_profile_csv(path: str, r, u, rho) -> None:
    """Write a radial profile as ``r,u,rho`` rows at full precision."""
    r = np.asarray(r, dtype=float)
    u = np.asarray(u, dtype=float)
    rho = np.asarray(rho, dtype=float)
    if not (r.shape == u.shape == rho.shape and r.ndim == 1):
        raise ValueError("profile columns must be 1-D arrays of equal length")
    if not (np.all(np.isfinite(u)) and np.all(np.isfinite(rho))):
        raise ValueError("profile contains non-finite values")
    lines = ["r,u,rho"]
    lines.extend(f"{_fmt(a)},{_fmt(b)},{_fmt(c)}" for a, b, c in zip(r, u, rho))
    atomic_write_text(path, "\n".join(lines) + "\n")
