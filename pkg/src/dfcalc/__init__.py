"""Discrete fractional calculus on finite unit-step grids, exact or in floating point."""
from .byparts import SBP_IDS, DualityClosure, SbpReport, duality_closure, sbp, sbp_boundary_convention
from .grid import DomainError, Grid, GridFunction, q_reflect, read_csv, restrict, symmetric_dual, write_csv
from .identities import IDENTITY_IDS, IdentityReport, check_identity, run_suite
from .kernels import (
    FracOrder,
    KernelSequence,
    PoleError,
    UndefinedFormError,
    falling_factorial,
    kernel_sequence,
    rising_factorial,
)
from .operators import (
    OPERATOR_NAMES,
    OperatorMatrix,
    OperatorSpec,
    apply,
    frac_diff_caputo,
    frac_diff_rl,
    frac_sum,
    int_diff,
    operator_matrix,
)
from .scalars import Backend, format_scalar, parse_scalar
from .variational import (
    Boundary,
    ConvergenceError,
    Lagrangian,
    QuadraticLagrangian,
    SingularSystemError,
    VariationalProblem,
    brute_force_minimize,
    el_residual,
    first_variation,
    functional_value,
    solve_quadratic,
)

__version__ = "0.1.0"
