"""The graph Laplacian, its powers, and local sup-norm bounds for them."""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Callable, Iterable, Mapping

import numpy as np

from . import kernels
from .graph import GraphError, WeightedGraph, ball, degree

__all__ = [
    "LaplacianError",
    "VertexFunction",
    "PowerBound",
    "BoundCheck",
    "apply_laplacian",
    "apply_laplacian_power",
    "laplacian_power_bound",
    "verify_power_bound",
]

BOUND_SLACK = 1e-12


class LaplacianError(GraphError):
    """A Laplacian was requested where the function is not defined."""


class VertexFunction:
    """Real function on a finite support; evaluation off the support fails.

    Use :meth:`extend_by_zero` to get an explicit zero extension.
    """

    __slots__ = ("_values", "support")

    def __init__(self, values: Mapping[int, float]):
        self._values = dict(values)
        self.support = tuple(self._values)

    @classmethod
    def from_callable(cls, fn: Callable[[int], float], support: Iterable[int]) -> "VertexFunction":
        return cls({int(x): fn(int(x)) for x in support})

    @classmethod
    def extend_by_zero(cls, f: "VertexFunction | Mapping[int, float]", support: Iterable[int]) -> "VertexFunction":
        vals = f._values if isinstance(f, VertexFunction) else dict(f)
        out = {int(x): vals.get(int(x), 0.0) for x in support}
        for x in vals:
            if x not in out:
                out[x] = vals[x]
        return cls(out)

    def __call__(self, x: int):
        try:
            return self._values[x]
        except KeyError:
            raise LaplacianError(f"function is not defined at vertex {x}") from None

    def __contains__(self, x: object) -> bool:
        return x in self._values

    def items(self):
        return self._values.items()

    def sup_abs(self, region: Iterable[int]):
        return max(abs(self(x)) for x in region)

    def __repr__(self) -> str:
        return f"VertexFunction({len(self.support)} vertices)"


def _require(f: VertexFunction, region: Iterable[int], x: int, k: int) -> None:
    for y in region:
        if y not in f:
            raise LaplacianError(
                f"Delta^{k} f({x}) needs f on the ball B_{k}({x}); vertex {y} is missing"
            )


def apply_laplacian(g: WeightedGraph, f: VertexFunction, x: int) -> float:
    """Delta f(x) = sum over y ~ x of (omega_xy / mu_x) (f(y) - f(x))."""
    g.check_vertex(x)
    _require(f, [x] + [y for y, _ in g.adjacency[x]], x, 1)
    fx = f(x)
    return sum(w / g.mu[x] * (f(y) - fx) for y, w in g.adjacency[x])


def _exact_power(g: WeightedGraph, f: VertexFunction, x: int, k: int) -> Fraction:
    vals = {y: Fraction(f(y)) for y in ball(g, x, k)}
    for j in range(k, 0, -1):
        region = ball(g, x, j - 1)
        vals = {
            y: sum(
                (Fraction(w) / Fraction(g.mu[y]) * (vals[z] - vals[y]) for z, w in g.adjacency[y]),
                Fraction(0),
            )
            for y in region
        }
    return vals[x]


def apply_laplacian_power(
    g: WeightedGraph, f: VertexFunction, x: int, k: int, exact: bool = False
):
    """Delta^k f(x) by k applications over shrinking balls around x.

    Needs f on B_k(x). With ``exact=True`` the float inputs are taken as the
    exact binary rationals they are and the result is a ``Fraction``.
    """
    if k < 0:
        raise LaplacianError(f"power must be >= 0, got {k}")
    g.check_vertex(x)
    region = ball(g, x, k)
    _require(f, region, x, k)
    if k == 0:
        return Fraction(f(x)) if exact else f(x)
    if exact:
        return _exact_power(g, f, x, k)

    indptr, indices, coef = g.csr()
    values = np.full(len(g.vertices), np.nan)
    for y in region:
        values[g.index[y]] = f(y)
    # region is sorted by distance, so B_j(x) is a prefix of it
    dist_counts = [len(ball(g, x, j)) for j in range(k)]
    rows_all = np.fromiter((g.index[y] for y in region), dtype=np.int64, count=len(region))
    for j in range(k - 1, -1, -1):
        rows = rows_all[: dist_counts[j]]
        out = kernels.laplacian_rows(indptr, indices, coef, values, rows)
        values = np.full(len(g.vertices), np.nan)
        values[rows] = out
    return float(values[g.index[x]])


@dataclass(frozen=True)
class PowerBound:
    value: float
    sup_degree: float
    # B_k(x) meets the window's truncation boundary: the degrees used there
    # are not the degrees of the underlying infinite graph
    truncated: bool

    def __float__(self) -> float:
        return self.value


def laplacian_power_bound(g: WeightedGraph, x: int, k: int, sup_f: float) -> PowerBound:
    """(2 sup_{B_k(x)} Deg)^k * sup_f, the local bound on |Delta^k f(x)|."""
    if k < 0:
        raise LaplacianError(f"power must be >= 0, got {k}")
    if sup_f < 0:
        raise LaplacianError(f"sup_f must be nonnegative, got {sup_f}")
    region = ball(g, x, k)
    sup_deg = max(degree(g, y) for y in region)
    trunc = bool(g.truncation_boundary.intersection(region))
    return PowerBound((2.0 * sup_deg) ** k * sup_f, sup_deg, trunc)


@dataclass(frozen=True)
class BoundCheck:
    lhs: float
    rhs: float
    holds: bool
    truncated: bool = False

    def __iter__(self):
        return iter((self.lhs, self.rhs, self.holds))


def verify_power_bound(
    g: WeightedGraph, f: VertexFunction, x: int, k: int, exact: bool = False
) -> BoundCheck:
    """Compare |Delta^k f(x)| with its bound using the actual sup of |f|.

    Floating mode allows relative slack ``BOUND_SLACK``; exact mode compares
    rationals with no slack.
    """
    region = ball(g, x, k)
    _require(f, region, x, k)
    if exact:
        lhs = abs(apply_laplacian_power(g, f, x, k, exact=True))
        sup_deg = max(
            sum((Fraction(w) for _, w in g.adjacency[y]), Fraction(0)) / Fraction(g.mu[y])
            for y in region
        )
        rhs = (2 * sup_deg) ** k * max(abs(Fraction(f(y))) for y in region)
        trunc = bool(g.truncation_boundary.intersection(region))
        return BoundCheck(lhs, rhs, lhs <= rhs, trunc)
    lhs = abs(apply_laplacian_power(g, f, x, k))
    pb = laplacian_power_bound(g, x, k, f.sup_abs(region))
    return BoundCheck(lhs, pb.value, lhs <= pb.value * (1 + BOUND_SLACK), pb.truncated)
