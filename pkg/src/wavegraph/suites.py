"""Seeded property sweeps behind ``wavegraph verify``.

Each suite returns a dict ``{property_name: PropertyResult}``. Failures are
results, not exceptions.
"""

from __future__ import annotations

from dataclasses import asdict, dataclass, field

import numpy as np

from .analyticity import (
    ZeroSolution,
    first_derivative_bound,
    intermediate_derivative_bound,
    uniqueness_gap,
)
from .graph import WeightedGraph, build_graph, line_graph_window
from .laplacian import VertexFunction, verify_power_bound
from .spectral import DirichletProblem, SpectralError, ZeroExtension, solve_wave
from .tychonoff import counterexample, growth_ratio, pde_residual

SUITES = ("lap-bound", "ore", "residual", "growth", "uniqueness")


@dataclass
class PropertyResult:
    passed: bool
    count: int
    failures: list = field(default_factory=list)
    detail: dict = field(default_factory=dict)

    def to_dict(self) -> dict:
        return asdict(self)


def random_weighted_graph(rng: np.random.Generator, max_vertices: int = 20,
                          low: float = 0.1, high: float = 10.0) -> WeightedGraph:
    """Random simple graph: a random spanning tree plus random extra edges."""
    n = int(rng.integers(2, max_vertices + 1))
    verts = [(i, float(rng.uniform(low, high))) for i in range(n)]
    edges = {}
    for i in range(1, n):
        j = int(rng.integers(0, i))
        edges[(j, i)] = float(rng.uniform(low, high))
    extra = int(rng.integers(0, n + 1))
    for _ in range(extra):
        a, b = sorted(int(v) for v in rng.choice(n, size=2, replace=False))
        edges.setdefault((a, b), float(rng.uniform(low, high)))
    return build_graph(verts, [(a, b, w) for (a, b), w in edges.items()])


def lap_bound_suite(seed: int, instances: int = 200) -> dict[str, PropertyResult]:
    """|Delta^k f(x)| <= (2 sup_{B_k(x)} Deg)^k sup_{B_k(x)} |f|, k <= 4."""
    rng = np.random.default_rng(seed)
    res = PropertyResult(True, 0)
    for case in range(instances):
        g = random_weighted_graph(rng)
        f = VertexFunction({x: float(rng.uniform(-1, 1)) for x in g.vertices})
        x = int(rng.choice(g.vertices))
        k = int(rng.integers(0, 5))
        chk = verify_power_bound(g, f, x, k)
        res.count += 1
        if not chk.holds:
            res.passed = False
            res.failures.append({"case": case, "x": x, "k": k, "lhs": chk.lhs, "rhs": chk.rhs})
    return {"laplacian_power_bound": res}


def _poly_max(coeffs: np.ndarray, a: float, b: float, points: int = 1000) -> float:
    """max |p| on [a, b]: 1000 sample points plus the interior critical points."""
    xs = np.linspace(a, b, points)
    crit = np.polynomial.polynomial.polyroots(np.polynomial.polynomial.polyder(coeffs)) if len(coeffs) > 2 else []
    crit = [c.real for c in np.atleast_1d(crit) if abs(c.imag) < 1e-9 and a <= c.real <= b]
    pts = np.concatenate([xs, np.asarray(crit, dtype=float)])
    return float(np.max(np.abs(np.polynomial.polynomial.polyval(pts, coeffs))))


def _deriv(coeffs: np.ndarray, order: int) -> np.ndarray:
    out = np.polynomial.polynomial.polyder(coeffs, order) if order else coeffs
    return out if len(out) else np.zeros(1)


def ore_suite(seed: int, instances: int = 100) -> dict[str, PropertyResult]:
    """First-derivative and Ore inequalities on random polynomials."""
    rng = np.random.default_rng(seed)
    lemma = PropertyResult(True, 0)
    ore = PropertyResult(True, 0)
    slack = 1e-9
    for case in range(instances):
        deg = int(rng.integers(0, 7))
        coeffs = rng.uniform(-1, 1, size=deg + 1)
        a = float(rng.uniform(-2, 2))
        b = a + float(rng.uniform(0.1, 3))
        M = [_poly_max(_deriv(coeffs, j), a, b) for j in range(7)]
        lemma.count += 1
        bound = first_derivative_bound(M[0], M[2], a, b)
        if M[1] > bound * (1 + slack) + slack:
            lemma.passed = False
            lemma.failures.append({"case": case, "M1": M[1], "bound": bound})
        for n in range(1, 6):
            for i in range(1, n + 1):
                ore.count += 1
                bound = intermediate_derivative_bound(M[0], M[n + 1], a, b, i, n)
                if M[i] > bound * (1 + slack) + slack:
                    ore.passed = False
                    ore.failures.append({"case": case, "i": i, "n": n, "Mi": M[i], "bound": bound})
    return {"first_derivative_bound": lemma, "ore_inequality": ore}


def residual_suite(seed: int, instances: int = 20) -> dict[str, PropertyResult]:
    """Wave residual of spectral solves and of the counterexample."""
    rng = np.random.default_rng(seed)
    spec = PropertyResult(True, 0)
    while spec.count < instances:
        g = random_weighted_graph(rng, max_vertices=14)
        size = int(rng.integers(1, len(g.vertices)))
        omega = sorted(int(v) for v in rng.choice(g.vertices, size=size, replace=False))
        data = {x: float(rng.uniform(-1, 1)) for x in omega}
        vel = {x: float(rng.uniform(-1, 1)) for x in omega}
        try:
            sol = solve_wave(DirichletProblem.create(g, omega, data, vel))
        except SpectralError:
            continue
        ts = rng.uniform(-5, 5, size=20)
        r = sol.residual(ts)
        spec.count += 1
        if r > 1e-9:
            spec.passed = False
            spec.failures.append({"omega": omega, "residual": r})

    ce = PropertyResult(True, 0)
    for m in (2, 3, 4):
        sol = counterexample(3, m, 256, k_max=m * 8 + m)
        for t in (0.25, 0.7, 1.5):
            for x in range(-6, 7):
                r = abs(pde_residual(sol, t, x))
                ce.count += 1
                if r > 1e-30:
                    ce.passed = False
                    ce.failures.append({"m": m, "t": t, "x": x, "residual": float(r)})
    return {"spectral_wave_residual": spec, "counterexample_residual": ce}


def growth_suite(seed: int) -> dict[str, PropertyResult]:
    """Monotone tail of |u(1, x)| exp(-3 x ln x) for beta = 3."""
    sol = counterexample(3, 2, 512, k_max=64)
    xs = list(range(21, 31))
    vals = [growth_ratio(sol, 1, x, 1) for x in xs]
    ok = all(b < a for a, b in zip(vals, vals[1:])) and vals[-1] < growth_ratio(sol, 1, 10, 1)
    res = PropertyResult(ok, len(xs), [] if ok else [{"x": xs, "ratios": [float(v) for v in vals]}])
    return {"growth_tail_decreasing": res}


def uniqueness_suite(seed: int) -> dict[str, PropertyResult]:
    rng = np.random.default_rng(seed)
    g = line_graph_window(40)
    omega = list(range(-4, 5))
    data = {x: float(rng.uniform(-1, 1)) for x in omega}
    vel = {x: float(rng.uniform(-1, 1)) for x in omega}
    u = ZeroExtension(solve_wave(DirichletProblem.create(g, omega, data, vel)))
    v = ZeroExtension(solve_wave(DirichletProblem.create(g, omega, data, vel)))
    grid = [(float(t), x) for t in np.linspace(-3, 3, 7) for x in range(-8, 9)]
    rep = uniqueness_gap(u, v, g, 0, 0.0, 0.0, 1.0 + sum(map(abs, data.values())) + 3 * sum(map(abs, vel.values())), grid)
    same = PropertyResult(rep.hypotheses_met and rep.gap <= 1e-10, 1, detail={"gap": rep.gap, "label": rep.label})

    tych = counterexample(3, 2, 256, k_max=64)
    grid = [(t, x) for t in (0.5, 1.0) for x in range(-25, 26)]
    neg = uniqueness_gap(ZeroSolution(), tych, g, 0, 0.0, 2.0, 1.0, grid)
    control = PropertyResult(
        (not neg.hypotheses_met) and neg.gap > 0,
        1,
        detail={"gap": neg.gap, "label": neg.label, "data_agree": neg.data_agree},
    )
    return {"identical_data_agree": same, "tychonoff_negative_control": control}


def run_suite(selector: str, seed: int) -> dict[str, dict[str, PropertyResult]]:
    runners = {
        "lap-bound": lap_bound_suite,
        "ore": ore_suite,
        "residual": residual_suite,
        "growth": growth_suite,
        "uniqueness": uniqueness_suite,
    }
    if selector == "all":
        names = SUITES
    elif selector in runners:
        names = (selector,)
    else:
        raise ValueError(f"unknown suite {selector!r}; choose from {', '.join(SUITES)}, all")
    return {name: runners[name](seed) for name in names}
