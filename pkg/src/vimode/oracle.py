"""Reference solutions: fixed-step classical RK4 and closed-form test problems."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable, Union

import numpy as np

from .expr import eval_expression
from .grid import GridFunction, make_grid
from .vim_scalar import NonFiniteValueError, ScalarIvp
from .vim_system import SystemIvp

Problem = Union[ScalarIvp, SystemIvp]


@dataclass(frozen=True)
class BuiltinProblem:
    name: str
    problem: Problem
    exact: Callable[[np.ndarray], np.ndarray]
    source: str
    description: str = ""

    def exact_on(self, grid) -> list:
        """Exact solution sampled at the grid nodes, one GridFunction per component."""
        values = np.atleast_2d(self.exact(grid.nodes))
        return [GridFunction(grid, row) for row in values]


def _rhs(problem: Problem, t: float, x: np.ndarray) -> np.ndarray:
    state = list(x)
    return np.array([float(eval_expression(f, t, state)) for f in problem.rhs])


def rk4_solve(problem: Problem, n_points: int) -> list:
    """Classical four-stage Runge-Kutta with fixed step on ``n_points`` nodes."""
    grid = make_grid(problem.t0, problem.tf, n_points)
    t = grid.nodes
    h = grid.h
    y = problem.initial.astype(float)
    out = np.empty((problem.dimension, n_points))
    out[:, 0] = y
    for j in range(n_points - 1):
        tj = t[j]
        k1 = _rhs(problem, tj, y)
        k2 = _rhs(problem, tj + h / 2, y + h / 2 * k1)
        k3 = _rhs(problem, tj + h / 2, y + h / 2 * k2)
        k4 = _rhs(problem, tj + h, y + h * k3)
        y = y + h / 6 * (k1 + 2 * k2 + 2 * k3 + k4)
        if not np.all(np.isfinite(y)):
            raise NonFiniteValueError("RK4 state", j + 1, 0)
        out[:, j + 1] = y
    return [GridFunction(grid, row) for row in out]


def _linear1_exact(t):
    return (np.exp(2 * t) - 2 * t - 1) / 4


def _riccati1_exact(t):
    return (1 - np.exp(-2 * t)) / (1 + np.exp(-2 * t))


def _harmonic_exact(t):
    return np.vstack([np.sin(t), np.cos(t)])


def _make_builtins() -> dict:
    return {
        "linear1": BuiltinProblem(
            "linear1",
            ScalarIvp.from_strings("2*x+t", 0.0, 0.0, 1.0),
            _linear1_exact,
            "linear test equation, exact (e^{2t} - 2t - 1)/4",
            "x' = 2x + t, x(0) = 0 on [0, 1]",
        ),
        # tanh is the solution of x' = 1 - x^2; x' = x^2 + 1 would give tan t
        "riccati1": BuiltinProblem(
            "riccati1",
            ScalarIvp.from_strings("1-x^2", 0.0, 0.0, 1.0),
            _riccati1_exact,
            "Riccati equation, exact (1 - e^{-2t})/(1 + e^{-2t})",
            "x' = 1 - x^2, x(0) = 0 on [0, 1]",
        ),
        "harmonic": BuiltinProblem(
            "harmonic",
            SystemIvp.from_strings(["x2", "-x1"], [0.0, 1.0], 0.0, 1.0),
            _harmonic_exact,
            "harmonic oscillator, exact (sin t, cos t)",
            "x1' = x2, x2' = -x1, x(0) = (0, 1) on [0, 1]",
        ),
    }


BUILTINS = _make_builtins()


def builtin(name: str) -> BuiltinProblem:
    try:
        return BUILTINS[name]
    except KeyError:
        known = ", ".join(sorted(BUILTINS))
        raise KeyError(f"unknown builtin problem {name!r} (known: {known})") from None
