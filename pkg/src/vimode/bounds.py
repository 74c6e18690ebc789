"""A priori error bounds for the continuous VIM iteration.

With a Lipschitz constant ``L`` on an interval of length ``T`` the
iterates satisfy

    ||u_n - x||_inf <= (M T)^n / n! * ||u_0 - x||_inf,

where ``M = 2 L exp(L T)`` for a scalar equation and
``M = (d + 1) L exp(L T)`` for a system of ``d`` equations (the two
agree at ``d = 1``).
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Sequence, Union

import numpy as np

from .expr import eval_expression
from .grid import GridFunction
from .vim_scalar import ScalarIvp
from .vim_system import SystemIvp

_LOG_MAX = math.log(np.finfo(float).max)


@dataclass(frozen=True)
class BoundInput:
    L: float
    T: float
    dimension: int = 1
    e0_norm: float = 1.0
    n: int = 0

    def __post_init__(self):
        if not self.L > 0:
            raise ValueError("L must be > 0")
        if not self.T > 0:
            raise ValueError("T must be > 0")
        if self.dimension < 1:
            raise ValueError("dimension must be >= 1")
        if not self.e0_norm >= 0:
            raise ValueError("e0_norm must be >= 0")
        if self.n < 0:
            raise ValueError("n must be >= 0")


def log_contraction_constant(L: float, T: float, dimension: int = 1) -> float:
    return math.log(dimension + 1) + math.log(L) + L * T


def contraction_constant(L: float, T: float, dimension: int = 1) -> float:
    """``M = (d + 1) L exp(L T)``; may be ``inf`` for large ``L T``."""
    log_m = log_contraction_constant(L, T, dimension)
    return math.exp(log_m) if log_m < _LOG_MAX else math.inf


def error_bound(bound: BoundInput) -> float:
    """``(M T)^n / n! * e0_norm`` evaluated in log space; saturates at ``inf``."""
    if bound.n == 0 or bound.e0_norm == 0:
        return float(bound.e0_norm)
    log_mt = log_contraction_constant(bound.L, bound.T, bound.dimension) + math.log(bound.T)
    log_b = bound.n * log_mt - math.lgamma(bound.n + 1) + math.log(bound.e0_norm)
    if log_b >= _LOG_MAX:
        return math.inf
    return math.exp(log_b)


def error_bounds(L: float, T: float, dimension: int, e0_norm: float,
                 ns: Sequence[int]) -> list:
    return [error_bound(BoundInput(L, T, dimension, e0_norm, n)) for n in ns]


def sample_lipschitz(problem: Union[ScalarIvp, SystemIvp],
                     trajectory: Union[GridFunction, Sequence[GridFunction]],
                     padding: float = 0.0) -> float:
    """Empirical estimate of L from the diagonal partial derivatives.

    Evaluates ``|df_k/dx_k|`` at every node of ``trajectory`` and at the
    states shifted by ``+padding`` and ``-padding`` (all components at
    once).  This is a lower estimate of the global constant the bounds
    assume and is meant for diagnostics only.
    """
    if padding < 0:
        raise ValueError("padding must be >= 0")
    if isinstance(trajectory, GridFunction):
        trajectory = [trajectory]
    if len(trajectory) != problem.dimension:
        raise ValueError("trajectory needs one grid function per component")
    t = trajectory[0].grid.nodes
    shifts = (0.0,) if padding == 0 else (0.0, padding, -padding)
    best = 0.0
    for shift in shifts:
        state = [u.values + shift for u in trajectory]
        for deriv in problem.diagonal:
            values = np.abs(np.asarray(eval_expression(deriv, t, state), dtype=float))
            best = max(best, float(np.max(values)))
    return best
