import math
from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from wavegraph.analyticity import (
    AnalyticityError,
    ZeroSolution,
    analytic_radius_lower_bound,
    certify_class_membership,
    decreasing_from,
    first_derivative_bound,
    intermediate_derivative_bound,
    log_odd_remainder_bound,
    log_taylor_remainder_bound,
    ore_K,
    remainder_trace,
    taylor_reconstruct,
    taylor_remainder_bound,
    uniqueness_gap,
)
from wavegraph.graph import line_graph_window
from wavegraph.spectral import DirichletProblem, ZeroExtension, solve_wave
from wavegraph.tychonoff import counterexample

LINE = line_graph_window(40)


def test_first_derivative_examples():
    assert first_derivative_bound(1, 0, 0, 1) == 2
    assert first_derivative_bound(0, 0, 0, 1) == 0
    xs = np.linspace(0, 1, 10001)
    assert first_derivative_bound(1, 100, 0, 1) == 102 >= np.max(np.abs(10 * np.cos(10 * xs)))
    with pytest.raises(AnalyticityError):
        first_derivative_bound(1, 1, 1, 1)


def test_ore_constants():
    assert ore_K(1, 1) == 2 and ore_K(2, 2) == 16 and ore_K(1, 3) == 18
    assert all(ore_K(1, n) == 2 * n * n for n in range(1, 8))
    assert isinstance(ore_K(3, 5), Fraction)
    for i, n in [(0, 2), (3, 2)]:
        with pytest.raises(AnalyticityError):
            ore_K(i, n)


def test_intermediate_examples():
    assert intermediate_derivative_bound(0, 0, 0, 1, 1, 2) == 0
    # x^3 on [0, 1]: M0 = 1, f''' = 6
    assert intermediate_derivative_bound(1.0, 6.0, 0.0, 1.0, 1, 2) >= 3


@given(
    st.fractions(-10, 10), st.fractions(0, 10), st.fractions(0, 10), st.fractions(Fraction(1, 100), 5)
)
def test_exact_identity_i1_n1(a, M0, M2, length):
    b = a + length
    left = intermediate_derivative_bound(M0, M2, a, b, 1, 1)
    assert isinstance(left, Fraction)
    assert left == first_derivative_bound(M0, M2, a, b)


def test_radius_examples():
    rep = analytic_radius_lower_bound(2, 0, 2)
    assert abs(rep.radius - 1 / math.e) <= 1e-15
    assert rep.epsilon == 0
    assert analytic_radius_lower_bound(2, 0, 0).unbounded
    assert analytic_radius_lower_bound(8, 0.5, 1.5).radius == pytest.approx(1 / (2 * math.e), rel=1e-15)
    with pytest.raises(AnalyticityError):
        analytic_radius_lower_bound(2, 0.5, 1.6)
    with pytest.raises(AnalyticityError):
        analytic_radius_lower_bound(0, 0, 1)


def test_radius_report_dict():
    d = analytic_radius_lower_bound(2, 0, 2, k_max=5).to_dict()
    assert d["radius"] == 1 / math.e and len(d["remainder_trace"]) == 5


def test_remainder_positive_eps_tends_to_zero():
    # the decay threshold grows like dt^2, so large dt needs a longer sweep
    for dt, k_max in ((0.5, 200), (2.0, 200), (10.0, 2000)):
        trace = remainder_trace(2, 0, 1, dt, k_max)
        start = decreasing_from(trace)
        assert start is not None and trace[-1][1] < trace[0][1] - 10


@pytest.mark.parametrize("D, alpha", [(2, 0), (3.5, 0.5), (8, 1.0), (1, 2)])
def test_remainder_radius_coherence(D, alpha):
    A1 = 2 - alpha
    r = math.sqrt(2 / D) / math.e
    below = remainder_trace(D, alpha, A1, 0.7 * r, 200, C=3.0, d=2)
    assert decreasing_from(below) is not None and below[-1][1] < below[0][1]
    above = remainder_trace(D, alpha, A1, 1.3 * r, 200, C=3.0, d=2)
    assert decreasing_from(above) is None and above[-1][1] > above[-2][1]
    sharp = remainder_trace(D, alpha, A1, 2 * r, 200)
    assert sharp[-1][1] > 100


def test_remainder_plain_and_overflow():
    lb = log_taylor_remainder_bound(3, 2, 0, 2, 1, 0, 0.3)
    assert taylor_remainder_bound(3, 2, 0, 2, 1, 0, 0.3) == pytest.approx(math.exp(lb))
    assert taylor_remainder_bound(200, 2, 0, 2, 1, 0, 5.0) == math.inf
    # large k uses log-Gamma; continuity across the switch
    a = log_taylor_remainder_bound(85, 2, 0, 2, 1, 0, 0.3)
    b = log_taylor_remainder_bound(86, 2, 0, 2, 1, 0, 0.3)
    assert abs(a - b) < 5
    with pytest.raises(AnalyticityError):
        log_taylor_remainder_bound(0, 2, 0, 2, 1, 0, 0.3)


def test_odd_remainder_decays_below_radius():
    vals = [log_odd_remainder_bound(k, 2, 0, 2, 1, 0, 0.25, 1.0) for k in range(2, 150)]
    assert vals[-1] < vals[0] and all(b < a for a, b in zip(vals[-40:], vals[-39:]))
    with pytest.raises(AnalyticityError):
        log_odd_remainder_bound(1, 2, 0, 2, 1, 0, 0.25, 1.0)


def single_mode(h=0.5):
    return solve_wave(DirichletProblem.create(LINE, [0], {0: 1.0}, {0: h}))


def test_taylor_reconstruct_spectral():
    sol = single_mode()
    value, tail = taylor_reconstruct(sol, 0, 0.0, 40, 0.3)
    assert abs(value - sol.evaluate(0.3, 0)) <= 1e-12 and tail < 1e-30


def test_spectral_solutions_exceed_radius():
    sol = solve_wave(DirichletProblem.create(LINE, range(-3, 4), {0: 1.0, 2: -0.5}, {1: 0.3}))
    t = 2 / math.e
    errs = [abs(taylor_reconstruct(sol, 1, 0.0, N, t)[0] - sol.evaluate(t, 1)) for N in (5, 15, 30)]
    assert errs[0] > errs[1] > errs[2] and errs[2] < 1e-12


def test_taylor_reconstruct_zero_and_tychonoff():
    assert taylor_reconstruct(ZeroSolution(), 3, 0.0, 10, 1.0) == (0.0, 0.0)
    tych = counterexample(1, 2, 256, k_max=50)
    for N in (0, 10, 40):
        assert taylor_reconstruct(tych, 0, 0, N, 0.5)[0] == 0
    assert tych.evaluate(0.5, 0) > 0.1
    with pytest.raises(AnalyticityError):
        taylor_reconstruct(tych, 0, 0, -1, 0.5)


def test_class_membership_bounded_solution():
    g0, h0 = {0: 1.0, 1: -0.5}, {-1: 0.25}
    sol = ZeroExtension(solve_wave(DirichletProblem.create(LINE, range(-3, 4), g0, h0)))
    T = 4.0
    C = max(map(abs, g0.values())) + max(map(abs, h0.values())) * T + 1
    grid = [(t, x) for t in np.linspace(-T, T, 9) for x in range(-10, 11)]
    cert = certify_class_membership(sol, LINE, 0, 0.0, 0.0, C, grid)
    assert cert.holds and cert.T == T
    assert len(cert.skipped) == 9 and all(x == 0 for _, x in cert.skipped)


def test_class_membership_zero_and_tychonoff():
    grid = [(t, x) for t in (0.5, 1.0) for x in range(-25, 26)]
    assert certify_class_membership(ZeroSolution(), LINE, 0, 0, 2, 1, grid).holds
    tych = counterexample(3, 2, 256, k_max=64)
    for C in (1, 1e3, 1e6):
        cert = certify_class_membership(tych, LINE, 0, 0.0, 2.0, C, grid)
        assert not cert.holds and cert.worst.log_margin > 0 and abs(cert.worst.x) >= 10


def test_class_membership_rejects_bad_A1():
    with pytest.raises(AnalyticityError, match="2 - alpha"):
        certify_class_membership(ZeroSolution(), LINE, 0, 1.0, 1.5, 1, [(0, 1)])


def test_uniqueness_examples():
    data, vel = {0: 0.3, 2: -1.0}, {1: 0.7}
    u = ZeroExtension(solve_wave(DirichletProblem.create(LINE, range(-4, 5), data, vel)))
    v = ZeroExtension(solve_wave(DirichletProblem.create(LINE, range(-4, 5), data, vel)))
    grid = [(float(t), x) for t in np.linspace(-2, 2, 5) for x in range(-6, 7)]
    rep = uniqueness_gap(u, v, LINE, 0, 0, 0, 10, grid)
    assert rep.gap <= 1e-10 and rep.label == "hypotheses met"
    assert uniqueness_gap(u, u, LINE, 0, 0, 0, 10, grid).gap == 0

    other = ZeroExtension(solve_wave(DirichletProblem.create(LINE, range(-4, 5), data, {1: 0.1})))
    rep = uniqueness_gap(u, other, LINE, 0, 0, 0, 10, grid)
    assert not rep.data_agree and rep.label == "hypotheses unmet" and rep.gap > 0

    tych = counterexample(3, 2, 256, k_max=64)
    grid = [(t, x) for t in (0.5, 1.0) for x in range(-20, 21)]
    rep = uniqueness_gap(ZeroSolution(), tych, LINE, 0, 0, 2, 1, grid)
    assert rep.data_agree and not rep.cert_v.holds and rep.label == "hypotheses unmet"
    assert rep.gap == max(float(abs(tych.evaluate(t, x))) for t, x in grid)
