"""``wavegraph`` command line.

Every artifact starts with the effective configuration, so two runs with the
same configuration and seed write byte-identical files. Exit status: 0 on
success, 1 on invalid input, 2 when a certification check fails.
"""

from __future__ import annotations

import argparse
import json
import logging
import math
import os
import sys
from concurrent.futures import ThreadPoolExecutor
from fractions import Fraction
from pathlib import Path
from typing import Callable, Sequence

import mpmath
import numpy as np

from . import __version__
from .analyticity import (
    AnalyticityError,
    ZeroSolution,
    analytic_radius_lower_bound,
    certify_class_membership,
    uniqueness_gap,
)
from .graph import GraphError, WeightedGraph, line_graph_window, load_graph, star_graph
from .spectral import DirichletProblem, SpectralError, ZeroExtension, solve_wave, solve_wave_forced
from .suites import SUITES, run_suite
from .tychonoff import (
    TychonoffError,
    counterexample,
    counterexample_eval,
    growth_ratio,
    pde_residual,
)

log = logging.getLogger("wavegraph")

EXIT_OK, EXIT_INVALID, EXIT_CERT = 0, 1, 2
DEFAULT_LINE_RADIUS = 64


class ConfigError(ValueError):
    """Invalid command-line configuration (exit status 1)."""


# -- formatting ----------------------------------------------------------------


def fmt(v, digits: int | None = None) -> str:
    """Shortest round-trip text for floats, fixed digits for mpf values."""
    if isinstance(v, mpmath.mpf):
        return mpmath.nstr(v, digits or 30, strip_zeros=False, min_fixed=-math.inf, max_fixed=-math.inf)
    if isinstance(v, (float, np.floating)):
        return repr(float(v))
    return str(v)


def _jsonable(obj):
    if isinstance(obj, dict):
        return {str(k): _jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_jsonable(v) for v in obj]
    if isinstance(obj, mpmath.mpf):
        return fmt(obj)
    if isinstance(obj, (np.floating, np.integer)):
        return obj.item()
    if isinstance(obj, Fraction):
        return str(obj)
    if isinstance(obj, float) and not math.isfinite(obj):
        return "inf" if obj > 0 else ("-inf" if obj < 0 else "nan")
    return obj


def dump_json(obj) -> str:
    return json.dumps(_jsonable(obj), sort_keys=True, indent=2) + "\n"


def effective_config(args: argparse.Namespace) -> dict:
    cfg = {k: v for k, v in vars(args).items() if k not in ("func", "output", "verbose")}
    return _jsonable(cfg)


def csv_text(config: dict, header: Sequence[str], rows: Sequence[Sequence[str]]) -> str:
    lines = [f"# wavegraph {__version__}", "# config: " + json.dumps(config, sort_keys=True)]
    lines.append(",".join(header))
    lines.extend(",".join(r) for r in rows)
    return "\n".join(lines) + "\n"


def write_artifact(args, name: str, text: str) -> None:
    if args.output:
        out = Path(args.output)
        out.mkdir(parents=True, exist_ok=True)
        (out / name).write_text(text, encoding="utf-8")
    else:
        sys.stdout.write(text)


def threads() -> int:
    try:
        return max(1, int(os.environ.get("WAVEGRAPH_THREADS", "1")))
    except ValueError:
        return 1


def parallel_map(fn: Callable, items: Sequence) -> list:
    """Map preserving input order; parallel when WAVEGRAPH_THREADS > 1."""
    n = threads()
    if n == 1 or len(items) < 2:
        return [fn(i) for i in items]
    with ThreadPoolExecutor(max_workers=n) as pool:
        return list(pool.map(fn, items))


# -- parsing helpers -------------------------------------------------------------


def resolve_graph(spec: str) -> WeightedGraph:
    """``line``, ``line:R``, ``star:n`` or a path to a JSON graph file."""
    if spec == "line":
        return line_graph_window(DEFAULT_LINE_RADIUS)
    if spec.startswith("line:"):
        return line_graph_window(int(spec.split(":", 1)[1]))
    if spec.startswith("star:"):
        return star_graph(int(spec.split(":", 1)[1]))
    if not Path(spec).exists():
        raise ConfigError(f"graph {spec!r} is neither a builtin nor an existing file")
    return load_graph(spec)


def parse_vertex_list(text: str) -> list[int]:
    """``"0,1,2"``, ``"-2..2"`` or a mix like ``"-3..-1,5"``."""
    out: list[int] = []
    for part in text.replace(" ", "").split(","):
        if not part:
            continue
        if ".." in part:
            lo, hi = part.split("..", 1)
            out.extend(range(int(lo), int(hi) + 1))
        else:
            out.append(int(part))
    if not out:
        raise ConfigError("empty vertex list")
    return out


def parse_vertex_values(text: str | None) -> dict[int, float]:
    """A JSON file ``{"vertex": value}`` or inline ``"0=1,1=-0.5"``."""
    if not text:
        return {}
    path = Path(text)
    if path.exists():
        raw = json.loads(path.read_text(encoding="utf-8"))
        if not isinstance(raw, dict):
            raise ConfigError(f"{text}: expected an object mapping vertex ids to numbers")
        return {int(k): float(v) for k, v in raw.items()}
    out = {}
    for part in text.split(","):
        if "=" not in part:
            raise ConfigError(f"cannot parse vertex value {part!r}; use x=value or a JSON file")
        k, v = part.split("=", 1)
        out[int(k)] = float(v)
    return out


def time_grid(t0: float, t1: float, steps: int) -> list[float]:
    if steps < 1:
        raise ConfigError("--steps must be >= 1")
    return [t0 + (t1 - t0) * j / steps for j in range(steps + 1)]


# -- solution specs ---------------------------------------------------------------


def spectral_spec(args) -> dict:
    return {
        "kind": "spectral",
        "graph": args.graph,
        "omega": parse_vertex_list(args.omega),
        "g": {str(k): v for k, v in sorted(parse_vertex_values(args.g).items())},
        "h": {str(k): v for k, v in sorted(parse_vertex_values(args.h).items())},
    }


def load_solution(spec_path: str, xmax: int = 0):
    """Rebuild a solution from a spec written by ``solve`` or ``counterexample``.

    Counterexample tables are deepened so that every |x| <= xmax evaluates.
    """
    try:
        spec = json.loads(Path(spec_path).read_text(encoding="utf-8"))
    except (OSError, json.JSONDecodeError) as exc:
        raise ConfigError(f"cannot read solution spec {spec_path}: {exc}") from None
    kind = spec.get("kind")
    if kind == "zero":
        return ZeroSolution()
    if kind == "spectral":
        g = resolve_graph(spec["graph"])
        g0 = {int(k): float(v) for k, v in spec.get("g", {}).items()}
        h0 = {int(k): float(v) for k, v in spec.get("h", {}).items()}
        return ZeroExtension(solve_wave(DirichletProblem.create(g, spec["omega"], g0, h0)))
    if kind == "counterexample":
        m = spec.get("order", 2)
        depth = max(spec.get("k_max", 64), m * (xmax + 1))
        return counterexample(spec["beta"], m, spec.get("precision", 256), depth)
    raise ConfigError(f"{spec_path}: unknown solution kind {kind!r}")


# -- subcommands --------------------------------------------------------------------


def _solve_rows(sol, ts: Sequence[float], omega: Sequence[int], residual: Callable) -> list[list[str]]:
    def row_block(t):
        u = sol.slice(t, 0)
        du = sol.slice(t, 1)
        r = residual([t])
        return [[fmt(float(t)), str(x), fmt(float(u[i])), fmt(float(du[i])), fmt(r)] for i, x in enumerate(omega)]

    return [row for block in parallel_map(row_block, ts) for row in block]


def cmd_solve(args) -> int:
    g = resolve_graph(args.graph)
    spec = spectral_spec(args)
    problem = DirichletProblem.create(g, spec["omega"], parse_vertex_values(args.g), parse_vertex_values(args.h))
    ts = time_grid(args.t0, args.t1, args.steps)
    sol = solve_wave(problem, args.tol)
    rows = _solve_rows(sol, ts, sol.omega, sol.residual)
    cfg = effective_config(args)
    write_artifact(args, "solve.csv", csv_text(cfg, ["t", "vertex", "u", "du_dt", "residual"], rows))
    worst = sol.residual(ts)
    summary = {
        "config": cfg,
        "version": __version__,
        "eigenvalues": [float(v) for v in sol.spectral.eigenvalues],
        "max_residual": worst,
        "reconstruction_error": sol.reconstruction_error(),
        "orthonormality_error": sol.spectral.orthonormality_error(),
        "jacobi_sweeps": sol.spectral.sweeps,
    }
    if args.output:
        write_artifact(args, "solution.json", dump_json(spec))
        write_artifact(args, "summary.json", dump_json(summary))
    if worst > args.residual_tol or sol.reconstruction_error() > 1e-10:
        log.error("wave residual %.3e exceeds tolerance %.1e", worst, args.residual_tol)
        return EXIT_CERT
    return EXIT_OK


def cmd_solve_forced(args) -> int:
    g = resolve_graph(args.graph)
    spec = spectral_spec(args)
    fvals = parse_vertex_values(args.f)
    freq = args.f_freq
    problem = DirichletProblem.create(g, spec["omega"], parse_vertex_values(args.g), parse_vertex_values(args.h))
    extra = set(fvals) - set(problem.omega)
    if extra:
        raise ConfigError(f"forcing is defined outside Omega at {sorted(extra)}")

    def forcing(t, x):
        return fvals.get(x, 0.0) * math.cos(freq * t)

    sol = solve_wave_forced(problem, forcing, args.step, args.tol)
    ts = time_grid(args.t0, args.t1, args.steps)
    rows = _solve_rows(sol, ts, sol.omega, sol.residual)
    cfg = effective_config(args)
    write_artifact(args, "solve_forced.csv", csv_text(cfg, ["t", "vertex", "u", "du_dt", "residual"], rows))
    if args.output:
        summary = {
            "config": cfg,
            "version": __version__,
            "max_residual": sol.residual(ts),
            "quadrature_error_estimate": sol.step_error(ts),
        }
        write_artifact(args, "summary.json", dump_json(summary))
    return EXIT_OK


def cmd_counterexample(args) -> int:
    tmax = Fraction(args.tmax)
    if args.xmax < 0 or tmax <= 0 or args.tsteps < 1 or args.jet < 0:
        raise ConfigError("need xmax >= 0, tmax > 0, tsteps >= 1, jet >= 0")
    if args.eps is not None:
        if not args.eps > 0:
            raise ConfigError(f"--eps must be positive, got {args.eps}")
        if not args.beta > 2 / args.eps:
            raise ConfigError(f"growth estimate needs beta > 2/eps; beta={args.beta}, 2/eps={2 / args.eps:g}")
    m = args.order
    k_max = m * (args.xmax + 1) + max(m, args.jet)
    sol = counterexample(args.beta, m, args.precision, k_max)
    digits = max(1, args.precision // 3)
    ts = [tmax * j / args.tsteps for j in range(args.tsteps + 1)]
    xs = list(range(-args.xmax, args.xmax + 1))

    def row(cell):
        t, x = cell
        u = counterexample_eval(sol, t, x)
        r = pde_residual(sol, t, x)
        gr = ""
        if args.eps is not None and x >= 2:
            gr = fmt(growth_ratio(sol, t, x, args.eps), digits)
        return u, r, [fmt(float(t)), str(x), fmt(u, digits), fmt(r, digits), gr]

    cells = [(t, x) for t in ts for x in xs]
    results = parallel_map(row, cells)
    rows = [r[2] for r in results]
    max_res = max(abs(r[1]) for r in results)

    jet_ok = all(counterexample_eval(sol, 0, x, k) == 0 for x in xs for k in range(args.jet + 1))
    tail = None
    if args.eps is not None and args.xmax >= 2:
        tail_x = list(range(max(2, args.xmax - 9), args.xmax + 1))
        vals = [growth_ratio(sol, tmax, x, args.eps) for x in tail_x]
        tail = {
            "t": args.tmax,
            "x": tail_x,
            "values": [fmt(v, digits) for v in vals],
            "decreasing": all(b < a for a, b in zip(vals, vals[1:])),
        }
    cfg = effective_config(args)
    cert = {
        "config": cfg,
        "version": __version__,
        "flat_jet_order": args.jet if jet_ok else None,
        "max_residual": fmt(max_res, digits),
        "residual_tolerance": args.residual_tol,
        "ratio_tail": tail,
    }
    header = ["t", "x", "u", "residual", "growth_ratio"]
    write_artifact(args, "counterexample.csv", csv_text(cfg, header, rows))
    write_artifact(args, "certificate.json", dump_json(cert))
    if args.output:
        spec = {"kind": "counterexample", "beta": args.beta, "order": m, "precision": args.precision, "k_max": k_max}
        write_artifact(args, "solution.json", dump_json(spec))
    if not jet_ok or max_res > args.residual_tol:
        return EXIT_CERT
    return EXIT_OK


def cmd_radius(args) -> int:
    rep = analytic_radius_lower_bound(args.D, args.alpha, args.A1, args.dt, args.kmax)
    out = rep.to_dict()
    out["version"] = __version__
    text = dump_json(out)
    sys.stdout.write(text)
    if args.output:
        write_artifact(args, "radius.json", text)
    return EXIT_OK


def _class_grid(args) -> list[tuple[float, int]]:
    ts = time_grid(-args.tmax if args.symmetric else 0.0, args.tmax, args.tsteps)
    return [(t, x) for t in ts for x in range(args.xmin, args.xmax + 1)]


def _cert_dict(cert) -> dict:
    return {
        "p": cert.p,
        "alpha": cert.alpha,
        "A1": cert.A1,
        "C": cert.C,
        "T": cert.T,
        "holds": cert.holds,
        "samples": len(cert.samples),
        "worst": None if cert.worst is None else {
            "t": cert.worst.t, "x": cert.worst.x, "abs_u": cert.worst.abs_u,
            "bound": cert.worst.bound, "log_margin": cert.worst.log_margin,
        },
        "skipped": [list(s) for s in cert.skipped],
    }


def cmd_class_check(args) -> int:
    g = resolve_graph(args.graph)
    u = load_solution(args.solution, max(abs(args.xmin), abs(args.xmax)))
    cert = certify_class_membership(u, g, args.p, args.alpha, args.A1, args.C, _class_grid(args))
    text = dump_json({"config": effective_config(args), "version": __version__, "certificate": _cert_dict(cert)})
    write_artifact(args, "class_check.json", text)
    return EXIT_OK if cert.holds else EXIT_CERT


def cmd_uniqueness(args) -> int:
    g = resolve_graph(args.graph)
    reach = max(abs(args.xmin), abs(args.xmax))
    u = load_solution(args.u, reach)
    v = load_solution(args.v, reach)
    rep = uniqueness_gap(u, v, g, args.p, args.alpha, args.A1, args.C, _class_grid(args))
    text = dump_json({
        "config": effective_config(args),
        "version": __version__,
        "gap": rep.gap,
        "data_gap": rep.data_gap,
        "data_agree": rep.data_agree,
        "hypotheses_met": rep.hypotheses_met,
        "label": rep.label,
        "certificate_u": _cert_dict(rep.cert_u),
        "certificate_v": _cert_dict(rep.cert_v),
    })
    write_artifact(args, "uniqueness.json", text)
    if rep.hypotheses_met and rep.gap > args.gap_tol:
        return EXIT_CERT
    return EXIT_OK


def cmd_verify(args) -> int:
    results = run_suite(args.suite, args.seed)
    report = {
        "config": effective_config(args),
        "version": __version__,
        "results": {s: {k: v.to_dict() for k, v in props.items()} for s, props in results.items()},
    }
    ok = all(v.passed for props in results.values() for v in props.values())
    report["passed"] = ok
    write_artifact(args, "verify.json", dump_json(report))
    return EXIT_OK if ok else EXIT_CERT


# -- argument parser -------------------------------------------------------------------


def _add_common(p: argparse.ArgumentParser) -> None:
    p.add_argument("--output", help="directory for artifacts (default: stdout)")
    p.add_argument("--seed", type=int, default=0, help="seed recorded in every artifact")


def _add_solve_args(p: argparse.ArgumentParser) -> None:
    p.add_argument("--graph", default="line", help="line, line:R, star:n or a JSON graph file")
    p.add_argument("--omega", required=True, help='vertex list, e.g. "-2..2" or "0,1"')
    p.add_argument("--g", help="initial values: JSON file or inline x=v,...")
    p.add_argument("--h", help="initial velocities: JSON file or inline x=v,...")
    p.add_argument("--t0", type=float, default=0.0)
    p.add_argument("--t1", type=float, default=1.0)
    p.add_argument("--steps", type=int, default=10)
    p.add_argument("--tol", type=float, default=1e-12, help="eigensolver tolerance")
    p.add_argument("--residual-tol", type=float, default=1e-9)


def _add_class_args(p: argparse.ArgumentParser) -> None:
    p.add_argument("--graph", default="line")
    p.add_argument("--p", type=int, default=0)
    p.add_argument("--alpha", type=float, default=0.0)
    p.add_argument("--A1", type=float, default=2.0)
    p.add_argument("--C", type=float, default=1.0)
    p.add_argument("--tmax", type=float, default=1.0)
    p.add_argument("--tsteps", type=int, default=4)
    p.add_argument("--xmin", type=int, default=-10)
    p.add_argument("--xmax", type=int, default=10)
    p.add_argument("--symmetric", action="store_true", help="sample t in [-tmax, tmax]")


class _Parser(argparse.ArgumentParser):
    # argparse exits with 2 on bad usage; here 2 means a failed certificate
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_INVALID, f"{self.prog}: error: {message}\n")


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="wavegraph", description=__doc__.splitlines()[0], allow_abbrev=False)
    parser.add_argument("--version", action="version", version=f"wavegraph {__version__}")
    parser.add_argument("-v", "--verbose", action="store_true")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("solve", help="Dirichlet wave problem on a finite set")
    _add_solve_args(p)
    _add_common(p)
    p.set_defaults(func=cmd_solve)

    p = sub.add_parser("solve-forced", help="Dirichlet problem with a source term")
    _add_solve_args(p)
    p.add_argument("--f", required=True, help="source amplitudes per vertex")
    p.add_argument("--f-freq", type=float, default=0.0, help="source is f_x cos(freq t)")
    p.add_argument("--step", type=float, default=0.01, help="quadrature step")
    _add_common(p)
    p.set_defaults(func=cmd_solve_forced)

    p = sub.add_parser("counterexample", help="flat-data solution on the integer line")
    p.add_argument("--beta", type=int, default=3)
    p.add_argument("--order", type=int, default=2, help="equation order m")
    p.add_argument("--precision", type=int, default=256, help="bits")
    p.add_argument("--tmax", type=str, default="2")
    p.add_argument("--tsteps", type=int, default=4)
    p.add_argument("--xmax", type=int, default=10)
    p.add_argument("--eps", type=float, default=None)
    p.add_argument("--jet", type=int, default=20, help="highest t-derivative checked at t=0")
    p.add_argument("--residual-tol", type=float, default=1e-30)
    _add_common(p)
    p.set_defaults(func=cmd_counterexample)

    p = sub.add_parser("radius", help="time-analyticity radius bound")
    p.add_argument("--D", type=float, required=True)
    p.add_argument("--alpha", type=float, required=True)
    p.add_argument("--A1", type=float, required=True)
    p.add_argument("--dt", type=float, default=None)
    p.add_argument("--kmax", type=int, default=200)
    _add_common(p)
    p.set_defaults(func=cmd_radius)

    p = sub.add_parser("class-check", help="sampled uniqueness-class membership")
    p.add_argument("--solution", required=True, help="solution.json from solve/counterexample")
    _add_class_args(p)
    _add_common(p)
    p.set_defaults(func=cmd_class_check)

    p = sub.add_parser("uniqueness", help="compare two solutions with the same data")
    p.add_argument("--u", required=True)
    p.add_argument("--v", required=True)
    p.add_argument("--gap-tol", type=float, default=1e-10)
    _add_class_args(p)
    _add_common(p)
    p.set_defaults(func=cmd_uniqueness)

    p = sub.add_parser("verify", help="seeded property suites")
    p.add_argument("--suite", choices=(*SUITES, "all"), default="all")
    _add_common(p)
    p.set_defaults(func=cmd_verify)
    return parser


def main(argv: Sequence[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING, format="%(levelname)s %(message)s")
    if args.command == "counterexample":
        try:
            Fraction(args.tmax)
        except ValueError:
            parser.error(f"--tmax: not a number: {args.tmax!r}")
    try:
        return args.func(args)
    except (ConfigError, GraphError, SpectralError, TychonoffError, AnalyticityError, ValueError, OSError) as exc:
        print(f"wavegraph {args.command}: error: {exc}", file=sys.stderr)
        return EXIT_INVALID


if __name__ == "__main__":
    sys.exit(main())
