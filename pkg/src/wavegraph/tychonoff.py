"""A nonzero wave on the integer line with identically zero Cauchy data.

The flat bump g(t) = exp(-t^-beta) (g = 0 for t <= 0) has every derivative
zero at t = 0. For an integer beta,

    g^(k)(t) = Q_k(1/t) exp(-t^-beta),
    Q_0 = 1,  Q_{k+1}(s) = beta s^(beta+1) Q_k(s) - s^2 Q_k'(s),

with integer coefficients. The solution of d^m u/dt^m = Delta u on Z is

    u(t, x) = sum_{k=0}^{x} g^(mk)(t) binom(x + k, 2k),   x >= 0,
    u(t, x) = u(t, -x - 1),                                x <= -1,

because binom(x + k, 2k) = (x+k)...(x-k+1) / (2k)! and its second
difference in x is binom(x + k - 1, 2k - 2).

Every time argument is converted to an exact rational, so the Laurent
polynomial part of a value is computed exactly and the single transcendental
factor exp(-t^-beta) is the only rounding. That factor is enclosed with
interval arithmetic and the result is refused if the enclosure is wider than
the promised relative error.
"""

from __future__ import annotations

import decimal
import logging
import math
import threading
from dataclasses import dataclass, field
from fractions import Fraction
from functools import lru_cache
from typing import Sequence

import mpmath
from mpmath import iv, mp

log = logging.getLogger(__name__)

__all__ = [
    "TychonoffError",
    "TableDepthError",
    "PrecisionError",
    "BumpTable",
    "CounterexampleSolution",
    "NonAnalyticityReport",
    "build_bump_table",
    "bump_derivative",
    "spatial_product",
    "counterexample",
    "counterexample_eval",
    "counterexample_rational",
    "pde_residual",
    "exact_pde_residual",
    "growth_ratio",
    "nonanalyticity_certificate",
    "recommended_precision",
    "to_rational",
]

DEFAULT_PRECISION = 256
GUARD_BITS = 32
_IV_LOCK = threading.Lock()


class TychonoffError(ValueError):
    pass


class TableDepthError(TychonoffError):
    def __init__(self, required: int, available: int):
        super().__init__(
            f"derivative table too shallow: need K_max >= {required}, have {available}"
        )
        self.required = required
        self.available = available


class PrecisionError(TychonoffError):
    pass


def to_rational(t) -> Fraction:
    """Exact rational value of ``t`` (int, float, Fraction, Decimal, str, mpf)."""
    if isinstance(t, Fraction):
        return t
    if isinstance(t, bool):
        raise TychonoffError("booleans are not time values")
    if isinstance(t, (int, float, decimal.Decimal)):
        return Fraction(t)
    if isinstance(t, str):
        return Fraction(t.strip())
    if isinstance(t, mpmath.mpf):
        man, exp = t.man_exp
        return Fraction(man) * Fraction(2) ** exp
    if hasattr(t, "__float__"):
        return Fraction(float(t))
    raise TychonoffError(f"cannot interpret {t!r} as a real number")


@dataclass(frozen=True)
class BumpTable:
    """Q_0..Q_kmax with g^(k)(t) = Q_k(1/t) exp(-t^-beta) for t > 0.

    ``polys[k]`` is ``(low, coeffs)``: Q_k(s) = sum_j coeffs[j] s^(low + j).
    """

    beta: int
    k_max: int
    polys: tuple[tuple[int, tuple[int, ...]], ...]

    def coefficients(self, k: int) -> dict[int, int]:
        low, coeffs = self.polys[k]
        return {low + j: c for j, c in enumerate(coeffs) if c}

    def check_recurrence(self) -> bool:
        """Re-derive each Q_{k+1} from Q_k and compare exactly."""
        for k in range(self.k_max):
            if _next_poly(self.beta, self.coefficients(k)) != self.coefficients(k + 1):
                return False
        return self.coefficients(0) == {0: 1}

    def evaluate_poly(self, k: int, s: Fraction) -> Fraction:
        if k > self.k_max:
            raise TableDepthError(k, self.k_max)
        return _eval_poly(self.polys[k], s.numerator, s.denominator)


def _next_poly(beta: int, q: dict[int, int]) -> dict[int, int]:
    out: dict[int, int] = {}
    for e, c in q.items():
        out[e + beta + 1] = out.get(e + beta + 1, 0) + beta * c
        if e:
            out[e + 1] = out.get(e + 1, 0) - e * c
    return {e: c for e, c in out.items() if c}


def _pack(q: dict[int, int]) -> tuple[int, tuple[int, ...]]:
    lo, hi = min(q), max(q)
    return lo, tuple(q.get(e, 0) for e in range(lo, hi + 1))


def _eval_poly(poly: tuple[int, tuple[int, ...]], p: int, q: int) -> Fraction:
    """Q(p/q) with integer Horner steps and one final division."""
    low, coeffs = poly
    acc = 0
    qpow = 1
    for c in reversed(coeffs):
        acc = acc * p + c * qpow
        qpow *= q
    # acc = sum_j c_j p^j q^(deg-j), qpow = q^(deg+1)
    deg = len(coeffs) - 1
    return Fraction(acc * p**low, q ** (deg + low))


@lru_cache(maxsize=32)
def _table(beta: int, k_max: int) -> BumpTable:
    polys = [{0: 1}]
    for _ in range(k_max):
        polys.append(_next_poly(beta, polys[-1]))
    return BumpTable(beta, k_max, tuple(_pack(q) for q in polys))


def build_bump_table(beta: int, k_max: int) -> BumpTable:
    """Exact integer Laurent coefficients of g, g', ..., g^(k_max)."""
    if isinstance(beta, bool) or int(beta) != beta or beta < 1:
        raise TychonoffError(f"beta must be a positive integer, got {beta!r}")
    if int(k_max) != k_max or k_max < 0:
        raise TychonoffError(f"K_max must be a natural number, got {k_max!r}")
    return _table(int(beta), int(k_max))


def _scaled_exp(factor: Fraction, s: Fraction, beta: int, precision: int) -> mpmath.mpf:
    """factor * exp(-s^beta), relative error <= 2^(8 - precision)."""
    if factor == 0:
        with mp.workprec(precision):
            return mp.mpf(0)
    z = s**beta
    # the interval context has only a global precision
    with _IV_LOCK:
        saved = iv.prec
        iv.prec = precision + GUARD_BITS
        try:
            enc = (iv.mpf(factor.numerator) / factor.denominator) * iv.exp(
                -(iv.mpf(z.numerator) / z.denominator)
            )
            lo, hi = enc.a, enc.b
        finally:
            iv.prec = saved
    with mp.workprec(precision + GUARD_BITS):
        mid = (mp.mpf(lo) + mp.mpf(hi)) / 2
        width = mp.mpf(hi) - mp.mpf(lo)
        if width > abs(mid) * mp.ldexp(1, 8 - precision):
            raise PrecisionError(
                f"interval enclosure too wide at {precision} bits (relative width "
                f"{mpmath.nstr(width / abs(mid), 3)})"
            )
    with mp.workprec(precision):
        return +mid


def bump_derivative(table: BumpTable, k: int, t, precision: int = DEFAULT_PRECISION) -> mpmath.mpf:
    """g^(k)(t) to ``precision`` bits; exactly 0 for t <= 0."""
    if k > table.k_max:
        raise TableDepthError(k, table.k_max)
    tr = to_rational(t)
    if tr <= 0:
        with mp.workprec(precision):
            return mp.mpf(0)
    s = 1 / tr
    return _scaled_exp(table.evaluate_poly(k, s), s, table.beta, precision)


def spatial_product(x: int, k: int) -> int:
    """(x + k)(x + k - 1)...(x - k + 1), 2k factors; 1 for k = 0."""
    if k < 0:
        raise TychonoffError(f"k must be >= 0, got {k}")
    if k == 0:
        return 1
    if k > x >= 0:
        return 0
    return math.prod(range(x - k + 1, x + k + 1))


@dataclass(frozen=True)
class CounterexampleSolution:
    """The flat-data solution of d^m u/dt^m = Delta u on Z."""

    beta: int
    m: int
    precision: int
    table: BumpTable
    _cache: dict = field(default_factory=dict, repr=False, compare=False)

    def time_derivative(self, t, x: int, order: int = 0) -> mpmath.mpf:
        return counterexample_eval(self, t, x, order)

    def evaluate(self, t, x: int) -> mpmath.mpf:
        return counterexample_eval(self, t, x, 0)

    __call__ = evaluate

    def required_depth(self, x: int, order: int = 0) -> int:
        xx = x if x >= 0 else -x - 1
        return order + self.m * xx


def counterexample(
    beta: int,
    m: int = 2,
    precision: int = DEFAULT_PRECISION,
    k_max: int = 64,
) -> CounterexampleSolution:
    if isinstance(m, bool) or int(m) != m or m < 2:
        raise TychonoffError(f"equation order m must be an integer >= 2, got {m!r}")
    if int(precision) != precision or precision < 16:
        raise TychonoffError(f"precision must be an integer >= 16 bits, got {precision!r}")
    return CounterexampleSolution(int(beta), int(m), int(precision), build_bump_table(beta, k_max))


def recommended_precision(x: int) -> int:
    """Working precision that keeps cancellation at |x| harmless."""
    ax = abs(x)
    return max(DEFAULT_PRECISION, math.ceil(64 + 4 * ax * math.log(ax + 2) / math.log(2)))


def counterexample_rational(sol: CounterexampleSolution, t, x: int, order: int = 0) -> Fraction:
    """Exact R with d^order u/dt^order (t, x) = R exp(-t^-beta); 0 for t <= 0."""
    need = sol.required_depth(x, order)
    if need > sol.table.k_max:
        raise TableDepthError(need, sol.table.k_max)
    tr = to_rational(t)
    if tr <= 0:
        return Fraction(0)
    key = (tr, x if x >= 0 else -x - 1, order)
    hit = sol._cache.get(key)
    if hit is not None:
        return hit
    xx = key[1]
    s = 1 / tr
    total = Fraction(0)
    for k in range(xx + 1):
        total += sol.table.evaluate_poly(sol.m * k + order, s) * math.comb(xx + k, 2 * k)
    sol._cache[key] = total
    return total


def counterexample_eval(sol: CounterexampleSolution, t, x: int, derivative_order: int = 0) -> mpmath.mpf:
    """d^order u / dt^order at (t, x), to ``sol.precision`` bits."""
    if derivative_order < 0:
        raise TychonoffError("derivative order must be >= 0")
    r = counterexample_rational(sol, t, x, derivative_order)
    tr = to_rational(t)
    if tr <= 0:
        with mp.workprec(sol.precision):
            return mp.mpf(0)
    return _scaled_exp(r, 1 / tr, sol.beta, sol.precision)


def pde_residual(sol: CounterexampleSolution, t, x: int) -> mpmath.mpf:
    """d^m u/dt^m (t, x) - [u(t, x+1) + u(t, x-1) - 2 u(t, x)] in floating point."""
    if sol.precision < recommended_precision(x):
        log.warning("precision %d bits is below the recommended %d at x=%d",
                    sol.precision, recommended_precision(x), x)
    dm = counterexample_eval(sol, t, x, sol.m)
    up = counterexample_eval(sol, t, x + 1)
    um = counterexample_eval(sol, t, x - 1)
    u0 = counterexample_eval(sol, t, x)
    with mp.workprec(sol.precision):
        return dm - (up + um - 2 * u0)


def exact_pde_residual(sol: CounterexampleSolution, t, x: int) -> Fraction:
    """The same residual divided by exp(-t^-beta), in exact arithmetic."""
    r = counterexample_rational
    return r(sol, t, x, sol.m) - (r(sol, t, x + 1) + r(sol, t, x - 1) - 2 * r(sol, t, x))


def growth_ratio(sol: CounterexampleSolution, t, x: int, eps) -> mpmath.mpf:
    """|u(t, x)| exp(-(2 + eps) x ln x)."""
    if not eps > 0:
        raise TychonoffError(f"eps must be positive, got {eps}")
    if not sol.beta > 2 / eps:
        raise TychonoffError(
            f"decay needs beta > 2/eps; beta={sol.beta}, 2/eps={2 / eps:g}"
        )
    if x < 2:
        raise TychonoffError(f"growth ratio is defined for x >= 2, got {x}")
    u = counterexample_eval(sol, t, x)
    with mp.workprec(sol.precision):
        return abs(u) * mp.exp(-(2 + mp.mpf(eps)) * x * mp.log(x))


@dataclass(frozen=True)
class NonAnalyticityReport:
    x: int
    jet_order: int
    jet: tuple[mpmath.mpf, ...]
    t_probe: Fraction
    probe_value: mpmath.mpf

    @property
    def flat(self) -> bool:
        return all(v == 0 for v in self.jet)

    @property
    def certified(self) -> bool:
        """Flat jet at t = 0 yet nonzero nearby: not analytic at 0."""
        return self.flat and self.probe_value != 0


def nonanalyticity_certificate(
    sol: CounterexampleSolution, x: int, K: int, t_probe=1
) -> NonAnalyticityReport:
    need = sol.required_depth(x, K)
    if need > sol.table.k_max:
        raise TableDepthError(need, sol.table.k_max)
    jet = tuple(counterexample_eval(sol, 0, x, k) for k in range(K + 1))
    tp = to_rational(t_probe)
    if tp <= 0:
        raise TychonoffError("the probe time must be positive")
    return NonAnalyticityReport(x, K, jet, tp, counterexample_eval(sol, tp, x))


def growth_tail(values: Sequence[mpmath.mpf]) -> bool:
    """True when the sequence is strictly decreasing."""
    return all(b < a for a, b in zip(values, values[1:]))
