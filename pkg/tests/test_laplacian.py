from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from conftest import graphs
from wavegraph.graph import ball, build_graph, degree, line_graph_window
from wavegraph.laplacian import (
    LaplacianError,
    VertexFunction,
    apply_laplacian,
    apply_laplacian_power,
    laplacian_power_bound,
    verify_power_bound,
)

LINE = line_graph_window(12)


def on_line(fn):
    return VertexFunction.from_callable(fn, LINE.vertices)


def test_examples_on_line():
    assert apply_laplacian(LINE, on_line(lambda x: x * x), 3) == 2
    assert apply_laplacian(LINE, on_line(lambda x: 5.0), 0) == 0
    assert apply_laplacian(LINE, on_line(lambda x: x), -4) == 0


def test_power_examples():
    f = on_line(lambda x: float(x**4))
    assert apply_laplacian_power(LINE, f, 7, 0) == 7**4
    assert apply_laplacian_power(LINE, f, 0, 2) == 24
    assert apply_laplacian_power(LINE, on_line(lambda x: 3.0), 2, 3) == 0


def test_power_matches_repeated_application():
    f = on_line(lambda x: float(x**4))
    once = VertexFunction({x: apply_laplacian(LINE, f, x) for x in range(-10, 11)})
    twice = apply_laplacian(LINE, once, 0)
    assert twice == apply_laplacian_power(LINE, f, 0, 2)


def test_missing_support_is_named():
    f = VertexFunction({0: 1.0, 1: 1.0})
    with pytest.raises(LaplacianError, match="vertex -1"):
        apply_laplacian(LINE, f, 0)
    with pytest.raises(LaplacianError, match=r"B_2\(0\)"):
        apply_laplacian_power(LINE, VertexFunction({x: 0.0 for x in (-1, 0, 1)}), 0, 2)
    with pytest.raises(LaplacianError, match="not defined"):
        f(5)


def test_extend_by_zero():
    f = VertexFunction.extend_by_zero({0: 2.0}, [-1, 0, 1])
    assert f(-1) == 0 and f(0) == 2 and 1 in f


def test_bound_examples():
    assert laplacian_power_bound(LINE, 0, 1, 1).value == 4
    assert laplacian_power_bound(LINE, 0, 0, 0.7).value == 0.7
    assert laplacian_power_bound(LINE, 0, 3, 1).value == 64
    assert laplacian_power_bound(LINE, 10, 3, 1).truncated
    lhs, rhs, holds = verify_power_bound(LINE, on_line(lambda x: x * x), 0, 1)
    assert (lhs, rhs, holds) == (2, 4, True)
    assert verify_power_bound(LINE, on_line(lambda x: 1.0), 0, 3).holds


def test_negative_inputs_rejected():
    with pytest.raises(LaplacianError):
        laplacian_power_bound(LINE, 0, -1, 1)
    with pytest.raises(LaplacianError):
        laplacian_power_bound(LINE, 0, 1, -1)


def random_function(g, seed):
    rng = np.random.default_rng(seed)
    return VertexFunction({x: float(rng.uniform(-1, 1)) for x in g.vertices})


COEFF = st.integers(-300, 300).map(lambda n: n / 100)


@given(graphs(), st.integers(0, 2**32 - 1), COEFF, COEFF)
def test_linearity(g, seed, a, b):
    f, h = random_function(g, seed), random_function(g, seed + 1)
    comb = VertexFunction({x: a * f(x) + b * h(x) for x in g.vertices})
    for x in g.vertices:
        lhs = apply_laplacian(g, comb, x)
        rhs = a * apply_laplacian(g, f, x) + b * apply_laplacian(g, h, x)
        # cancellation can make Delta small; measure against the terms' size
        scale = 2 * degree(g, x) * (abs(a) + abs(b))
        assert abs(lhs - rhs) <= 1e-12 * max(abs(rhs), scale)


@given(graphs(), st.integers(0, 2**32 - 1))
def test_first_order_bound(g, seed):
    f = random_function(g, seed)
    for x in g.vertices:
        sup = f.sup_abs(ball(g, x, 1))
        assert abs(apply_laplacian(g, f, x)) <= 2 * degree(g, x) * sup * (1 + 1e-12)


@given(graphs(), st.integers(0, 2**32 - 1), st.integers(0, 4))
def test_power_bound_property(g, seed, k):
    f = random_function(g, seed)
    for x in g.vertices[:5]:
        assert verify_power_bound(g, f, x, k).holds


@given(graphs(max_vertices=8), st.integers(0, 2**32 - 1), st.integers(1, 3))
def test_exact_mode_agrees_and_holds(g, seed, k):
    f = random_function(g, seed)
    x = g.vertices[0]
    exact = apply_laplacian_power(g, f, x, k, exact=True)
    assert isinstance(exact, Fraction)
    assert abs(float(exact) - apply_laplacian_power(g, f, x, k)) <= 1e-9 * (1 + abs(float(exact)))
    assert verify_power_bound(g, f, x, k, exact=True).holds


def test_self_adjoint_on_window():
    rng = np.random.default_rng(3)
    n = 30
    verts = [(x, float(rng.uniform(0.1, 10))) for x in range(n)]
    edges = [(x, x + 1, float(rng.uniform(0.1, 10))) for x in range(n - 1)]
    edges += [(x, x + 3, float(rng.uniform(0.1, 10))) for x in range(0, n - 3, 4)]
    g = build_graph(verts, edges)
    # f, h vanish within distance 1 of both ends
    inner = range(4, n - 4)
    f = VertexFunction.extend_by_zero({x: float(rng.uniform(-1, 1)) for x in inner}, g.vertices)
    h = VertexFunction.extend_by_zero({x: float(rng.uniform(-1, 1)) for x in inner}, g.vertices)
    a = sum(g.mu[x] * f(x) * apply_laplacian(g, h, x) for x in g.vertices)
    b = sum(g.mu[x] * h(x) * apply_laplacian(g, f, x) for x in g.vertices)
    assert abs(a - b) <= 1e-10
