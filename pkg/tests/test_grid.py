from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from hypothesis.extra.numpy import arrays

from vimode.grid import (
    GridError,
    GridFunction,
    make_grid,
    mixed_norm,
    norm_inf,
    tail_integrals,
    trapezoid_integral,
)


def _gf(values, t0=0.0, tf=1.0):
    return GridFunction(make_grid(t0, tf, len(values)), values)


def _loop_tail(g, i, h):
    # the reference backward loop, written out literally
    z = [0.0] * (i + 1)
    for j in range(i - 1, -1, -1):
        z[j] = 0.5 * h * (g[j] + g[j + 1]) + z[j + 1]
    return np.array(z)


def _loop_trapezoid(g, i, h):
    s = g[0] + g[i]
    for j in range(1, i):
        s = s + 2 * g[j]
    return 0.5 * h * s


class TestGrid:
    def test_three_nodes(self):
        g = make_grid(0, 1, 3)
        np.testing.assert_array_equal(g.nodes, [0.0, 0.5, 1.0])
        assert g.h == 0.5

    def test_paper_grid_last_node_exact(self):
        g = make_grid(0, 1, 100)
        assert g.h == 1 / 99
        assert g.nodes[99] == 1.0
        assert g.nodes[0] == 0.0

    @pytest.mark.parametrize("args", [(2, 2, 5), (1, 0, 5), (0, 1, 1)])
    def test_invalid(self, args):
        with pytest.raises(GridError):
            make_grid(*args)

    def test_values_length_checked(self):
        with pytest.raises(GridError):
            GridFunction(make_grid(0, 1, 3), [1.0, 2.0])

    def test_grid_function_interpolates_linearly(self):
        u = _gf([0.0, 1.0, 4.0])
        assert u(0.25) == 0.5
        assert u(0.75) == 2.5


class TestNorms:
    def test_norm_inf(self):
        assert norm_inf(_gf([0.0, -3.0, 2.0])) == 3.0
        assert norm_inf(_gf([0.0] * 4)) == 0.0
        assert norm_inf(_gf([1e-5] * 7)) == 1e-5

    def test_mixed_norm_examples(self):
        assert mixed_norm([_gf([1.0, 0.0]), _gf([0.0, 2.0])]) == 2.0
        assert mixed_norm([_gf([1.0, 1.0]), _gf([1.0, 1.0])]) == 2.0

    def test_mixed_norm_grid_mismatch(self):
        with pytest.raises(GridError):
            mixed_norm([_gf([1.0, 0.0]), _gf([0.0, 2.0], tf=2.0)])

    @given(arrays(float, st.integers(2, 30), elements=st.floats(-1e6, 1e6)))
    def test_single_component_collapse(self, values):
        u = _gf(values)
        assert mixed_norm([u]) == norm_inf(u)


class TestQuadrature:
    def test_linear_exact(self):
        assert trapezoid_integral(_gf([0.0, 0.5, 1.0]), 2) == 0.5

    def test_t_squared_eleven_nodes(self):
        # exact rational evaluation of the composite rule
        h = Fraction(1, 10)
        g = [(j * h) ** 2 for j in range(11)]
        oracle = h / 2 * (g[0] + g[10] + 2 * sum(g[1:10]))
        assert oracle == Fraction(335, 1000)
        t = make_grid(0, 1, 11).nodes
        assert trapezoid_integral(_gf(t**2), 10) == pytest.approx(0.335, rel=1e-14)

    @pytest.mark.parametrize("n", [2, 3, 17, 100])
    def test_constant(self, n):
        assert trapezoid_integral(_gf([2.0] * n), n - 1) == pytest.approx(2.0, rel=1e-14)

    @pytest.mark.parametrize("i", [0, 3])
    def test_index_range(self, i):
        with pytest.raises(GridError):
            trapezoid_integral(_gf([1.0, 2.0, 3.0]), i)
        with pytest.raises(GridError):
            tail_integrals(_gf([1.0, 2.0, 3.0]), i)

    def test_tail_constant(self):
        g = _gf([3.0] * 9)
        z = tail_integrals(g, 6)
        t = g.grid.nodes
        np.testing.assert_allclose(z, 3.0 * (t[6] - t[:7]), rtol=1e-14, atol=1e-15)

    def test_tail_linear(self):
        np.testing.assert_array_equal(tail_integrals(_gf([0.0, 0.5, 1.0]), 2), [0.5, 0.375, 0.0])

    def test_tail_paper_constant_derivative(self):
        z = tail_integrals(_gf([2.0] * 100), 99)
        assert z[0] == pytest.approx(2.0, rel=1e-14)
        assert z[99] == 0.0

    @settings(max_examples=100)
    @given(
        arrays(float, st.integers(2, 60), elements=st.floats(-100, 100)),
        st.floats(0.01, 10),
        st.data(),
    )
    def test_bitwise_against_reference_loops(self, values, length, data):
        g = _gf(values, 0.0, length)
        i = data.draw(st.integers(1, len(values) - 1))
        h = g.grid.h
        np.testing.assert_array_equal(tail_integrals(g, i), _loop_tail(values, i, h))
        assert trapezoid_integral(g, i) == _loop_trapezoid(values, i, h)

    @settings(max_examples=100)
    @given(
        arrays(float, st.integers(2, 60), elements=st.floats(-100, 100)),
        st.data(),
    )
    def test_tail_and_forward_agree(self, values, data):
        g = _gf(values)
        i = data.draw(st.integers(1, len(values) - 1))
        z0 = tail_integrals(g, i)[0]
        forward = trapezoid_integral(g, i)
        scale = np.sum(np.abs(values[: i + 1])) * g.grid.h
        assert abs(z0 - forward) <= 1e-12 * max(scale, 1e-300)

    def test_second_order(self):
        errors = []
        for intervals in (10, 20, 40, 80):
            t = make_grid(0, 1, intervals + 1).nodes
            errors.append(abs(trapezoid_integral(_gf(t**2), intervals) - 1 / 3))
        for coarse, fine in zip(errors, errors[1:]):
            assert coarse / fine == pytest.approx(4.0, rel=0.10)
