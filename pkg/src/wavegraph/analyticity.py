"""Derivative bounds, Taylor remainders and time-analyticity radii.

Two kinds of objects are accepted wherever a "solution" appears: anything
with ``evaluate(t, x)`` and ``time_derivative(t, x, order)``. That covers
:class:`~wavegraph.spectral.WaveSolution`, its :class:`ZeroExtension`, the
counterexample and :class:`ZeroSolution`.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterable, Protocol, Sequence

import mpmath
from mpmath import mp

from .graph import UNREACHABLE, WeightedGraph, distances_from

__all__ = [
    "AnalyticityError",
    "Solution",
    "ZeroSolution",
    "ClassCertificate",
    "RadiusReport",
    "UniquenessReport",
    "first_derivative_bound",
    "ore_K",
    "intermediate_derivative_bound",
    "certify_class_membership",
    "analytic_radius_lower_bound",
    "log_taylor_remainder_bound",
    "taylor_remainder_bound",
    "log_odd_remainder_bound",
    "remainder_trace",
    "taylor_reconstruct",
    "uniqueness_gap",
]


class AnalyticityError(ValueError):
    pass


class Solution(Protocol):
    def evaluate(self, t, x: int): ...

    def time_derivative(self, t, x: int, order: int = 0): ...


class ZeroSolution:
    """u = 0, the solution every flat-data problem is compared against."""

    def evaluate(self, t, x: int) -> float:
        return 0.0

    def time_derivative(self, t, x: int, order: int = 0) -> float:
        return 0.0

    __call__ = evaluate


# -- one-variable derivative inequalities ------------------------------------


def first_derivative_bound(M0, M2, a, b):
    """max |f'| <= 2 M0 / (b - a) + (b - a) M2 on [a, b].

    Exact when the arguments are Fractions/ints.
    """
    if not b > a:
        raise AnalyticityError(f"need b > a, got [{a}, {b}]")
    L = b - a
    return 2 * M0 / L + L * M2


def ore_K(i: int, n: int) -> Fraction:
    """2^i n^2 (n^2 - 1) ... (n^2 - (i-1)^2) / (1 * 3 * ... * (2i - 1))."""
    if not 1 <= i <= n:
        raise AnalyticityError(f"Ore constant needs 1 <= i <= n, got i={i}, n={n}")
    num = 2**i * math.prod(n * n - j * j for j in range(i))
    den = math.prod(range(1, 2 * i, 2))
    return Fraction(num, den)


def intermediate_derivative_bound(M0, M_top, a, b, i: int, n: int):
    """Bound on max |f^(i)| from M0 = max |f| and M_top = max |f^(n+1)|.

    K(i, n) / (b - a)^i * (M0 + (b - a)^(n+1) / (n+1)! * M_top), exact for
    rational input and float otherwise.
    """
    if not b > a:
        raise AnalyticityError(f"need b > a, got [{a}, {b}]")
    K = ore_K(i, n)
    L = b - a
    if all(isinstance(v, (int, Fraction)) for v in (M0, M_top, a, b)):
        L = Fraction(L)
        return K / L**i * (M0 + L ** (n + 1) / math.factorial(n + 1) * M_top)
    L = float(L)
    return float(K) / L**i * (M0 + L ** (n + 1) / math.factorial(n + 1) * M_top)


# -- uniqueness class ----------------------------------------------------------


@dataclass(frozen=True)
class ClassSample:
    t: float
    x: int
    d: int
    abs_u: float
    bound: float
    # log|u| - log bound; <= 0 means the sample satisfies the bound
    log_margin: float


@dataclass(frozen=True)
class ClassCertificate:
    """Sampled check of |u(t, x)| <= C d(x, p)^(A1 d(x, p)).

    Only the listed samples are certified; the class itself is a statement
    about all (t, x).
    """

    p: int
    alpha: float
    C: float
    A1: float
    T: float
    samples: tuple[ClassSample, ...]
    holds: bool
    worst: ClassSample | None = None
    skipped: tuple[tuple[float, int], ...] = ()


def _log_abs(v) -> float:
    if v == 0:
        return -math.inf
    with mp.workprec(64):
        return float(mp.log(abs(mp.mpf(v))))


def certify_class_membership(
    u: Solution,
    g: WeightedGraph,
    p: int,
    alpha: float,
    A1: float,
    C: float,
    grid: Iterable[tuple[float, int]],
) -> ClassCertificate:
    """Check the growth bound at each (t, x) of ``grid`` with x != p.

    Comparisons are made in log space so that huge values of the
    counterexample do not overflow. Samples at x = p, or outside p's
    component, are listed in ``skipped``.
    """
    if not 0 <= alpha <= 2:
        raise AnalyticityError(f"alpha must lie in [0, 2], got {alpha}")
    if not 0 <= A1 <= 2 - alpha:
        raise AnalyticityError(
            f"the uniqueness-class hypothesis needs 0 <= A1 <= 2 - alpha = {2 - alpha}, got A1={A1}"
        )
    if not C > 0:
        raise AnalyticityError(f"C must be positive, got {C}")
    dist = distances_from(g, p)
    samples, skipped = [], []
    T = 0.0
    for t, x in grid:
        d = dist.get(x, UNREACHABLE)
        if x == p or d is UNREACHABLE:
            skipped.append((t, x))
            continue
        T = max(T, abs(float(t)))
        val = u.evaluate(t, x)
        log_bound = math.log(C) + A1 * d * math.log(d)
        margin = _log_abs(val) - log_bound
        samples.append(
            ClassSample(
                float(t), x, d, float(abs(val)) if abs(val) < 1e300 else math.inf,
                math.exp(log_bound) if log_bound < 690 else math.inf, margin,
            )
        )
    worst = max(samples, key=lambda s: s.log_margin, default=None)
    holds = all(s.log_margin <= 0 for s in samples)
    return ClassCertificate(p, float(alpha), float(C), float(A1), T, tuple(samples), holds, worst, tuple(skipped))


# -- Taylor remainder bounds ---------------------------------------------------


def _log_factorial(n: int) -> float:
    # exact below the float factorial overflow point, log-Gamma above it
    if n <= 170:
        return math.log(math.factorial(n))
    return math.lgamma(n + 1)


def _log_power_bound(j: int, D: float, alpha: float, A1: float, C: float, d: int) -> float:
    """log of (2D)^j (j+d)^(alpha j) C (j+d)^(A1 (j+d)), the bound on |Delta^j u|."""
    r = j + d
    lr = math.log(r) if r > 0 else 0.0
    return j * math.log(2 * D) + alpha * j * lr + math.log(C) + A1 * r * lr


def log_taylor_remainder_bound(k: int, D: float, alpha: float, A1: float, C: float, d: int, dt: float) -> float:
    """log of the even-order remainder bound |Delta^k u| / (2k)! * dt^(2k)."""
    if k < 1:
        raise AnalyticityError(f"k must be >= 1, got {k}")
    if not dt > 0:
        raise AnalyticityError(f"dt must be positive, got {dt}")
    return _log_power_bound(k, D, alpha, A1, C, d) - _log_factorial(2 * k) + 2 * k * math.log(dt)


def taylor_remainder_bound(k: int, D: float, alpha: float, A1: float, C: float, d: int, dt: float) -> float:
    """The even-order remainder bound itself (``inf`` when it overflows)."""
    lb = log_taylor_remainder_bound(k, D, alpha, A1, C, d, dt)
    return math.exp(lb) if lb < 709 else math.inf


def log_odd_remainder_bound(
    k: int, D: float, alpha: float, A1: float, C: float, d: int, dt: float, T: float
) -> float:
    """log bound on |R_{2k-2}| through the first-derivative inequality on [0, T].

    |d^(2k-1)u| <= 2/T max|Delta^(k-1) u| + T max|Delta^k u|.
    """
    if k < 2:
        raise AnalyticityError(f"the odd-order case needs k >= 2, got {k}")
    if not T > 0 or not dt > 0:
        raise AnalyticityError("T and dt must be positive")
    lo = math.log(2 / T) + _log_power_bound(k - 1, D, alpha, A1, C, d)
    hi = math.log(T) + _log_power_bound(k, D, alpha, A1, C, d)
    deriv = max(lo, hi) + math.log1p(math.exp(-abs(lo - hi)))
    return deriv - _log_factorial(2 * k - 1) + (2 * k - 1) * math.log(dt)


def remainder_trace(
    D: float, alpha: float, A1: float, dt: float, k_max: int = 200, C: float = 1.0, d: int = 0
) -> list[tuple[int, float]]:
    return [(k, log_taylor_remainder_bound(k, D, alpha, A1, C, d, dt)) for k in range(1, k_max + 1)]


def decreasing_from(trace: Sequence[tuple[int, float]]) -> int | None:
    """Smallest k after which the log trace decreases strictly to the end."""
    if len(trace) < 2:
        return None
    start = len(trace) - 1
    while start > 0 and trace[start][1] < trace[start - 1][1]:
        start -= 1
    return trace[start][0] if start < len(trace) - 1 else None


@dataclass(frozen=True)
class RadiusReport:
    D: float
    alpha: float
    A1: float
    epsilon: float
    # None means the radius is unbounded
    radius: float | None
    dt: float
    remainder_trace: tuple[tuple[int, float], ...] = field(repr=False)
    decreasing_from: int | None

    @property
    def unbounded(self) -> bool:
        return self.radius is None

    def to_dict(self) -> dict:
        return {
            "D": self.D,
            "alpha": self.alpha,
            "A1": self.A1,
            "epsilon": self.epsilon,
            "radius": self.radius,
            "unbounded": self.unbounded,
            "dt": self.dt,
            "decreasing_from": self.decreasing_from,
            "remainder_trace": [[k, v] for k, v in self.remainder_trace],
        }


def analytic_radius_lower_bound(
    D: float,
    alpha: float,
    A1: float,
    dt: float | None = None,
    k_max: int = 200,
    C: float = 1.0,
    d: int = 0,
) -> RadiusReport:
    """Guaranteed time-analyticity radius under the degree and growth bounds.

    Unbounded when A1 < 2 - alpha, else (1/e) sqrt(2/D). The trace is the
    log remainder bound at step ``dt`` (default: half the radius, or 1).
    """
    if not D > 0:
        raise AnalyticityError(f"D must be positive, got {D}")
    if not 0 <= alpha <= 2:
        raise AnalyticityError(f"alpha must lie in [0, 2], got {alpha}")
    if not 0 <= A1 <= 2 - alpha:
        raise AnalyticityError(f"need 0 <= A1 <= 2 - alpha = {2 - alpha}, got A1={A1}")
    eps = 2 - alpha - A1
    radius = None if eps > 0 else math.sqrt(2 / D) / math.e
    if dt is None:
        dt = 1.0 if radius is None else radius / 2
    trace = remainder_trace(D, alpha, A1, dt, k_max, C, d)
    return RadiusReport(float(D), float(alpha), float(A1), eps, radius, float(dt), tuple(trace), decreasing_from(trace))


# -- Taylor reconstruction -----------------------------------------------------


def taylor_reconstruct(sol: Solution, x0: int, t0, N: int, t):
    """Taylor polynomial of degree N of u(., x0) at t0, evaluated at t.

    Returns ``(value, tail)`` where ``tail`` is the magnitude of the last
    term. Values are mpf when the derivatives are.
    """
    if N < 0:
        raise AnalyticityError(f"N must be >= 0, got {N}")
    derivs = [sol.time_derivative(t0, x0, k) for k in range(N + 1)]
    high = any(isinstance(v, mpmath.mpf) for v in derivs)
    if high:
        with mp.workprec(max(getattr(sol, "precision", 53), 53)):
            h = mp.mpf(t) - mp.mpf(t0)
            terms = [mp.mpf(v) * h**k / mp.factorial(k) for k, v in enumerate(derivs)]
            return mp.fsum(terms), abs(terms[-1])
    h = float(t) - float(t0)
    terms = [float(v) * h**k / math.factorial(k) for k, v in enumerate(derivs)]
    return math.fsum(terms), abs(terms[-1])


# -- uniqueness ----------------------------------------------------------------


@dataclass(frozen=True)
class UniquenessReport:
    gap: float
    data_gap: float
    data_agree: bool
    cert_u: ClassCertificate
    cert_v: ClassCertificate
    hypotheses_met: bool

    @property
    def label(self) -> str:
        return "hypotheses met" if self.hypotheses_met else "hypotheses unmet"


def uniqueness_gap(
    u: Solution,
    v: Solution,
    g: WeightedGraph,
    p: int,
    alpha: float,
    A1: float,
    C: float,
    grid: Sequence[tuple[float, int]],
    data_tol: float = 1e-10,
) -> UniquenessReport:
    """max |u - v| over the grid, with the uniqueness hypotheses checked.

    The hypotheses are: same Cauchy data at t = 0 on the grid's vertices and
    a passing class certificate for both solutions. Only homogeneous
    problems are compared. The gap is always reported; ``hypotheses_met``
    says whether the uniqueness theorem speaks about it.
    """
    xs = sorted({x for _, x in grid})
    data_gap = 0.0
    for x in xs:
        for order in (0, 1):
            diff = abs(u.time_derivative(0, x, order) - v.time_derivative(0, x, order))
            data_gap = max(data_gap, float(diff))
    gap = 0.0
    for t, x in grid:
        gap = max(gap, float(abs(u.evaluate(t, x) - v.evaluate(t, x))))
    cu = certify_class_membership(u, g, p, alpha, A1, C, grid)
    cv = certify_class_membership(v, g, p, alpha, A1, C, grid)
    agree = data_gap <= data_tol
    return UniquenessReport(gap, data_gap, agree, cu, cv, agree and cu.holds and cv.holds)
