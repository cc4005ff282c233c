"""Ground states of the fractional plasma equation (-Lap)^s u = a (u - C)_+^p.

Radially decreasing solutions on the unit ball are computed in a weighted
Jacobi polynomial basis whose Riesz potential is known in closed form; the
scaling family, far-field asymptotics and the aggregation-diffusion
steady-state correspondence are exposed on top of the solver, together
with a validation suite and file artifacts for the command line.
"""

from .groundstate import (
    GroundStateSolution,
    Regime,
    SteadyStateView,
    classify_regime,
    critical_bubble,
    far_field,
    from_coefficients,
    mass_scaling,
    rescale,
    supercritical_constant,
    to_steady_state,
)
from .riesz import (
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
from .serialize import (
    read_solution,
    solution_from_dict,
    solution_to_dict,
    write_profile_csv,
    write_solution,
)
from .solver import (
    ConvergenceError,
    NoGroundStateError,
    NumericsError,
    ProblemParams,
    RegimeError,
    SolveDiagnostics,
    family_residual,
    jacobian_system,
    residual_system,
    solve,
    solve_continuation,
    solve_eigen_p1,
    solve_fixed_point,
    solve_newton,
)
from .validation import (
    CheckReport,
    CoefficientDecayReport,
    check_boundary_continuity,
    check_far_field_mass,
    check_orthogonality,
    check_pohozaev,
    check_scaling_consistency,
    coefficient_decay_report,
)

__version__ = "0.1.0"

__all__ = [
    "BasisParams",
    "CheckReport",
    "CoefficientDecayReport",
    "ConvergenceError",
    "GroundStateSolution",
    "NoGroundStateError",
    "NumericsError",
    "ProblemParams",
    "Regime",
    "RegimeError",
    "SolveDiagnostics",
    "SpectralCoefficients",
    "SteadyStateView",
    "boundary_multiplier",
    "check_boundary_continuity",
    "check_far_field_mass",
    "check_orthogonality",
    "check_pohozaev",
    "check_scaling_consistency",
    "classify_regime",
    "coefficient_decay_report",
    "critical_bubble",
    "family_residual",
    "far_field",
    "from_coefficients",
    "jacobian_system",
    "lambda_all",
    "lambda_n",
    "mass",
    "mass_scaling",
    "mu_all",
    "mu_n",
    "oscillation",
    "q_all",
    "q_k",
    "read_solution",
    "rescale",
    "residual_system",
    "rho_eval",
    "riesz_kernel_constant",
    "solution_from_dict",
    "solution_to_dict",
    "solve",
    "solve_continuation",
    "solve_eigen_p1",
    "solve_fixed_point",
    "solve_newton",
    "supercritical_constant",
    "to_steady_state",
    "u_inside",
    "u_outside",
    "write_profile_csv",
    "write_solution",
    "__version__",
]
