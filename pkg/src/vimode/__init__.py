"""Variational iteration method for scalar ODEs and first-order systems."""

__version__ = "0.1.0"

from .bounds import BoundInput, contraction_constant, error_bound, sample_lipschitz
from .expr import (
    EvaluationError,
    ParseError,
    differentiate,
    eval_expression,
    parse_expression,
    simplify,
    to_string,
)
from .grid import (
    Grid,
    GridFunction,
    make_grid,
    mixed_norm,
    norm_inf,
    tail_integrals,
    trapezoid_integral,
)
from .oracle import BuiltinProblem, builtin, rk4_solve
from .vim_scalar import (
    NonFiniteValueError,
    ScalarIvp,
    SolveConfig,
    SolveReport,
    lambda_factor,
    vim_solve_scalar,
    vim_step_scalar,
)
from .vim_system import SystemIvp, SystemSolveReport, vim_solve_system, vim_step_system

__all__ = [
    "BoundInput", "BuiltinProblem", "EvaluationError", "Grid", "GridFunction",
    "NonFiniteValueError", "ParseError", "ScalarIvp", "SolveConfig", "SolveReport",
    "SystemIvp", "SystemSolveReport", "builtin", "contraction_constant", "differentiate",
    "error_bound", "eval_expression", "lambda_factor", "make_grid", "mixed_norm", "norm_inf",
    "parse_expression", "rk4_solve", "sample_lipschitz", "simplify", "tail_integrals",
    "to_string", "trapezoid_integral", "vim_solve_scalar", "vim_solve_system",
    "vim_step_scalar", "vim_step_system",
]
