"""Discrete variational iteration for a scalar initial value problem.

Each iteration applies the derivative-free form of the VIM correction

    u_new(t) = int_{t0}^{t} (f(s, u) - f_x(s, u) u(s)) exp(int_s^t f_x) ds
               + exp(int_{t0}^{t} f_x) x0

on an equidistant grid, with ``u`` read as a piecewise linear function
and both integrals taken with the trapezoid rule.  The loop structure and
summation order follow the classic O(N^2) reference listing so results
are reproducible to the last bit.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass, field
from typing import Callable, Optional

import numpy as np

from .expr import ExpressionNode, differentiate, eval_expression, parse_expression
from .grid import Grid, GridFunction, make_grid, norm_inf, tail_sums, trapezoid_sum

log = logging.getLogger(__name__)

#: ``trace(component, i, z, w)`` receives the kernel exponents and weighted
#: integrand used for target node ``i``.  Components are 0-based.
Trace = Callable[[int, int, np.ndarray, np.ndarray], None]


class SolverError(RuntimeError):
    pass


class NonFiniteValueError(SolverError):
    def __init__(self, what: str, node: int, iteration: int, component: Optional[int] = None):
        self.node = node
        self.iteration = iteration
        self.component = component
        where = f"node {node}, iteration {iteration}"
        if component is not None:
            where += f", component {component + 1}"
        super().__init__(f"non-finite {what} at {where}")


@dataclass(frozen=True)
class ScalarIvp:
    """x'(t) = f(t, x), x(t0) = x0 on [t0, tf]."""

    f: ExpressionNode
    f_x: ExpressionNode
    x0: float
    t0: float
    tf: float

    def __post_init__(self):
        if not self.t0 < self.tf:
            raise ValueError(f"invalid interval [{self.t0}, {self.tf}]")

    @classmethod
    def from_strings(cls, f: str, x0: float, t0: float = 0.0, tf: float = 1.0,
                     df: Optional[str] = None) -> "ScalarIvp":
        """Build a problem from text; ``f_x`` is derived symbolically unless ``df`` is given."""
        rhs = parse_expression(f, 1)
        f_x = parse_expression(df, 1) if df is not None else differentiate(rhs, 1)
        return cls(rhs, f_x, float(x0), float(t0), float(tf))

    @property
    def dimension(self) -> int:
        return 1

    @property
    def rhs(self) -> list:
        return [self.f]

    @property
    def diagonal(self) -> list:
        return [self.f_x]

    @property
    def initial(self) -> np.ndarray:
        return np.array([self.x0])


@dataclass(frozen=True)
class SolveConfig:
    n_points: int = 100
    tol: float = 1e-5
    max_iters: int = 5
    keep_iterates: bool = False

    def __post_init__(self):
        if self.n_points < 2:
            raise ValueError("n_points must be >= 2")
        if not self.tol > 0:
            raise ValueError("tol must be > 0")
        if self.max_iters < 1:
            raise ValueError("max_iters must be >= 1")


@dataclass
class SolveReport:
    """Result of :func:`vim_solve_scalar`.

    ``iterates`` (when requested) holds ``u_0, u_1, ..., u_n`` so that
    ``iterates[n]`` is the n-th iterate and ``iterates[-1] is solution``.
    """

    solution: GridFunction
    iterations: int
    converged: bool
    residual_history: list = field(default_factory=list)
    iterates: Optional[list] = None


def lambda_factor(z):
    """Positive multiplier kernel ``exp(z)``; the minus sign lives in the transformed formula."""
    with np.errstate(over="ignore"):
        return np.exp(z)


def _nodal_eval(e: ExpressionNode, t: np.ndarray, state: list) -> np.ndarray:
    value = eval_expression(e, t, state)
    return np.broadcast_to(np.asarray(value, dtype=float), t.shape).copy()


def vim_sweep(grid: Grid, f0: np.ndarray, df0: np.ndarray, u_old: np.ndarray,
              x0: float, iteration: int = 0, component: Optional[int] = None,
              trace: Optional[Trace] = None) -> np.ndarray:
    """One VIM update from precomputed nodal ``f`` and ``f_x`` values."""
    n = grid.n_points
    h = grid.h
    for j, (a, b) in enumerate(zip(f0, df0)):
        if not (np.isfinite(a) and np.isfinite(b)):
            raise NonFiniteValueError("right-hand side", j, iteration, component)
    base = f0 - df0 * u_old
    u_new = np.full(n, x0, dtype=float)
    for i in range(1, n):
        z = tail_sums(df0, i, h)
        kernel = lambda_factor(z)
        if not np.isfinite(kernel[0]):
            raise NonFiniteValueError("multiplier", i, iteration, component)
        w = base[: i + 1] * kernel
        if trace is not None:
            trace(0 if component is None else component, i, z, w)
        u_new[i] = trapezoid_sum(w, i, h) + kernel[0] * x0
        if not np.isfinite(u_new[i]):
            raise NonFiniteValueError("iterate value", i, iteration, component)
    return u_new


def vim_step_scalar(problem: ScalarIvp, u_old: GridFunction, iteration: int = 0,
                    trace: Optional[Trace] = None) -> GridFunction:
    """Apply one VIM correction to ``u_old``.

    ``f`` and ``f_x`` are evaluated once over the whole grid, then every
    target node ``i`` gets its own kernel ``exp(z)`` from the backward
    trapezoid sums of ``f_x`` over ``[t_j, t_i]``.
    """
    grid = u_old.grid
    t = grid.nodes
    state = [u_old.values]
    f0 = _nodal_eval(problem.f, t, state)
    df0 = _nodal_eval(problem.f_x, t, state)
    values = vim_sweep(grid, f0, df0, u_old.values, problem.x0, iteration, None, trace)
    return GridFunction(grid, values)


def vim_solve_scalar(problem: ScalarIvp, config: SolveConfig,
                     trace: Optional[Trace] = None) -> SolveReport:
    """Iterate from ``u_0 = x0`` until the nodal sup-norm change drops below ``tol``.

    Hitting ``max_iters`` first is not an error; the report's ``converged``
    flag is False in that case.
    """
    grid = make_grid(problem.t0, problem.tf, config.n_points)
    u_old = GridFunction(grid, np.full(grid.n_points, problem.x0))
    iterates = [u_old] if config.keep_iterates else None
    history = []
    while True:
        u_new = vim_step_scalar(problem, u_old, len(history) + 1, trace)
        residual = norm_inf(u_new - u_old)
        history.append(residual)
        log.debug("iteration %d residual %.3e", len(history), residual)
        u_old = u_new
        if iterates is not None:
            iterates.append(u_new)
        if residual < config.tol or len(history) >= config.max_iters:
            break
    return SolveReport(
        solution=u_old,
        iterations=len(history),
        converged=history[-1] < config.tol,
        residual_history=history,
        iterates=iterates,
    )
