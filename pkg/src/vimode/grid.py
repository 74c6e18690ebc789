"""Equidistant grids, nodal grid functions and trapezoidal quadrature.

A :class:`GridFunction` stores nodal values and stands for the piecewise
linear interpolant through them.  The quadrature helpers reproduce the
summation order of the reference scheme exactly, because the iteration
results are compared bit for bit.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from functools import cached_property
from typing import Sequence

import numpy as np


class GridError(ValueError):
    pass


@dataclass(frozen=True)
class Grid:
    """``n_points`` equally spaced nodes on ``[t0, tf]``, both ends included."""

    t0: float
    tf: float
    n_points: int

    def __post_init__(self):
        if not (np.isfinite(self.t0) and np.isfinite(self.tf)) or not self.t0 < self.tf:
            raise GridError(f"invalid interval [{self.t0}, {self.tf}]")
        if self.n_points < 2:
            raise GridError(f"need at least 2 grid points, got {self.n_points}")

    @property
    def h(self) -> float:
        return (self.tf - self.t0) / (self.n_points - 1)

    @property
    def T(self) -> float:
        return self.tf - self.t0

    @cached_property
    def nodes(self) -> np.ndarray:
        t = np.linspace(self.t0, self.tf, self.n_points)
        t[-1] = self.tf
        t.setflags(write=False)
        return t


def make_grid(t0: float, tf: float, n_points: int) -> Grid:
    return Grid(float(t0), float(tf), int(n_points))


@dataclass(frozen=True, eq=False)
class GridFunction:
    grid: Grid
    values: np.ndarray = field(repr=False)

    def __post_init__(self):
        values = np.array(self.values, dtype=float)
        if values.shape != (self.grid.n_points,):
            raise GridError(
                f"expected {self.grid.n_points} nodal values, got shape {values.shape}"
            )
        values.setflags(write=False)
        object.__setattr__(self, "values", values)

    def __call__(self, t):
        """Evaluate the piecewise linear interpolant."""
        return np.interp(t, self.grid.nodes, self.values)

    def __sub__(self, other: "GridFunction") -> "GridFunction":
        _check_same_grid([self, other])
        return GridFunction(self.grid, self.values - other.values)

    def __len__(self):
        return self.grid.n_points


def _check_same_grid(us: Sequence[GridFunction]):
    if any(u.grid != us[0].grid for u in us[1:]):
        raise GridError("grid functions live on different grids")


def norm_inf(u: GridFunction) -> float:
    """Maximum absolute nodal value."""
    return float(np.max(np.abs(u.values)))


def mixed_norm(us: Sequence[GridFunction]) -> float:
    """Max over nodes of the 1-norm across components.

    For a single component this is :func:`norm_inf`.
    """
    if len(us) == 0:
        raise GridError("mixed_norm needs at least one component")
    _check_same_grid(us)
    if len(us) == 1:
        return norm_inf(us[0])
    total = np.abs(us[0].values)
    for u in us[1:]:
        total = total + np.abs(u.values)
    return float(np.max(total))


def _nodal(g) -> tuple[np.ndarray, float]:
    if isinstance(g, GridFunction):
        return g.values, g.grid.h
    raise TypeError("expected a GridFunction")


def _check_index(i: int, n_points: int):
    if not 1 <= i <= n_points - 1:
        raise GridError(f"index {i} outside 1..{n_points - 1}")


def trapezoid_integral(g: GridFunction, upto_index: int) -> float:
    """Composite trapezoid rule for the integral from node 0 to node ``upto_index``.

    Computes ``(h/2) * (g_0 + g_i + 2 * sum(g_1..g_{i-1}))`` with the sum
    accumulated left to right.
    """
    values, h = _nodal(g)
    _check_index(upto_index, len(values))
    return trapezoid_sum(values, upto_index, h)


def trapezoid_sum(values: np.ndarray, i: int, h: float) -> float:
    # s = w0 + wi, then s += 2*wj for j = 1..i-1 in order
    s = values[0] + values[i]
    if i > 1:
        terms = np.empty(i)
        terms[0] = s
        terms[1:] = 2 * values[1:i]
        s = np.add.accumulate(terms)[-1]
    return float(0.5 * h * s)


def tail_integrals(g: GridFunction, upto_index: int) -> np.ndarray:
    """Trapezoid approximations of the integrals from node j to node ``upto_index``.

    Returns ``z`` of length ``upto_index + 1`` with ``z[i] = 0`` and the
    backward recurrence ``z[j] = (h/2) * (g[j] + g[j+1]) + z[j+1]``.
    """
    values, h = _nodal(g)
    _check_index(upto_index, len(values))
    return tail_sums(values, upto_index, h)


def tail_sums(values: np.ndarray, i: int, h: float) -> np.ndarray:
    z = np.zeros(i + 1)
    panels = 0.5 * h * (values[:i] + values[1 : i + 1])
    # accumulate runs sequentially, matching the backward loop bit for bit
    z[:i] = np.add.accumulate(panels[::-1])[::-1]
    return z
