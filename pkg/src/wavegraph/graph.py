"""Weighted graphs G = (V, E, mu, omega) with combinatorial distances.

Infinite graphs (the integer line in particular) are represented by finite
windows. A window records the vertices whose degree was cut by truncation in
``truncation_boundary``; anything computed within a ball that meets that set
is flagged by the downstream modules.
"""

from __future__ import annotations

import json
from collections import deque
from dataclasses import dataclass, field
from json import decoder as _json_decoder
from json import scanner as _json_scanner
from typing import Iterable, Mapping, Sequence

import numpy as np

__all__ = [
    "GraphError",
    "UNREACHABLE",
    "WeightedGraph",
    "GrowthCertificate",
    "build_graph",
    "line_graph_window",
    "star_graph",
    "distance",
    "ball",
    "vertex_boundary",
    "degree",
    "certify_degree_growth",
    "connected_components",
    "load_graph",
    "loads_graph",
    "graph_to_dict",
]


class GraphError(ValueError):
    """Raised for malformed graph input or invalid vertex references."""


class _Unreachable:
    """Sentinel distance between vertices in different components."""

    _instance = None

    def __new__(cls):
        if cls._instance is None:
            cls._instance = super().__new__(cls)
        return cls._instance

    def __repr__(self) -> str:
        return "UNREACHABLE"

    def __bool__(self) -> bool:
        return False


UNREACHABLE = _Unreachable()


@dataclass(frozen=True, eq=False)
class WeightedGraph:
    """Immutable simple undirected weighted graph.

    Use :func:`build_graph` rather than the constructor; it validates input
    and fills the adjacency index.
    """

    vertices: tuple[int, ...]
    mu: Mapping[int, float]
    edges: tuple[tuple[int, int, float], ...]
    adjacency: Mapping[int, tuple[tuple[int, float], ...]]
    truncation_boundary: frozenset[int] = frozenset()
    index: Mapping[int, int] = field(default_factory=dict)

    def __contains__(self, x: object) -> bool:
        return x in self.mu

    def __len__(self) -> int:
        return len(self.vertices)

    def neighbors(self, x: int) -> tuple[tuple[int, float], ...]:
        self.check_vertex(x)
        return self.adjacency[x]

    def check_vertex(self, x: int) -> None:
        if x not in self.mu:
            raise GraphError(f"vertex {x!r} is not in the graph")

    @property
    def is_truncated(self) -> bool:
        return bool(self.truncation_boundary)

    def csr(self) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
        """CSR arrays (indptr, indices, omega/mu) in ``self.vertices`` order."""
        cached = self.__dict__.get("_csr")
        if cached is not None:
            return cached
        indptr = np.zeros(len(self.vertices) + 1, dtype=np.int64)
        indices: list[int] = []
        coef: list[float] = []
        for i, x in enumerate(self.vertices):
            for y, w in self.adjacency[x]:
                indices.append(self.index[y])
                coef.append(w / self.mu[x])
            indptr[i + 1] = len(indices)
        out = (indptr, np.asarray(indices, dtype=np.int64), np.asarray(coef, dtype=np.float64))
        object.__setattr__(self, "_csr", out)
        return out


@dataclass(frozen=True)
class GrowthCertificate:
    p: int
    alpha: float
    D: float
    checked_radius: int
    holds: bool
    minimal_D: float
    # largest distance actually reached from p; below checked_radius means the
    # graph ran out of vertices before the requested radius
    available_radius: int
    limited: bool
    violations: tuple[int, ...] = ()


def build_graph(
    vertex_spec: Iterable[tuple[int, float]],
    edge_spec: Iterable[tuple[int, int, float]],
    truncation_boundary: Iterable[int] = (),
) -> WeightedGraph:
    """Validate vertex/edge lists and build the adjacency index.

    Raises:
        GraphError: duplicate vertex, missing endpoint, self-loop, repeated
            edge, or a nonpositive measure/weight. The message names the
            offending element.
    """
    mu: dict[int, float] = {}
    order: list[int] = []
    for vid, m in vertex_spec:
        if isinstance(vid, bool) or not isinstance(vid, (int, np.integer)):
            raise GraphError(f"vertex id {vid!r} is not an integer")
        vid = int(vid)
        if vid in mu:
            raise GraphError(f"duplicate vertex id {vid}")
        m = float(m)
        if not m > 0 or not np.isfinite(m):
            raise GraphError(f"vertex {vid}: measure mu={m} must be positive")
        mu[vid] = m
        order.append(vid)

    adj: dict[int, list[tuple[int, float]]] = {v: [] for v in order}
    seen: set[tuple[int, int]] = set()
    edges: list[tuple[int, int, float]] = []
    for u, v, w in edge_spec:
        u, v = int(u), int(v)
        for end in (u, v):
            if end not in mu:
                raise GraphError(f"edge ({u}, {v}): endpoint {end} is missing")
        if u == v:
            raise GraphError(f"edge ({u}, {v}): self-loop")
        key = (min(u, v), max(u, v))
        if key in seen:
            raise GraphError(f"edge ({u}, {v}): repeated edge")
        w = float(w)
        if not w > 0 or not np.isfinite(w):
            raise GraphError(f"edge ({u}, {v}): weight w={w} must be positive")
        seen.add(key)
        edges.append((u, v, w))
        adj[u].append((v, w))
        adj[v].append((u, w))

    trunc = frozenset(int(x) for x in truncation_boundary)
    for x in trunc:
        if x not in mu:
            raise GraphError(f"truncation vertex {x} is not in the graph")

    return WeightedGraph(
        vertices=tuple(order),
        mu=dict(mu),
        edges=tuple(edges),
        adjacency={v: tuple(nb) for v, nb in adj.items()},
        truncation_boundary=trunc,
        index={v: i for i, v in enumerate(order)},
    )


def line_graph_window(radius: int) -> WeightedGraph:
    """The window {-radius, ..., radius} of the unit-weight integer line.

    The two endpoints have degree 1 instead of 2 and are recorded as the
    truncation boundary.
    """
    if int(radius) != radius or radius < 1:
        raise GraphError(f"window radius must be a positive integer, got {radius!r}")
    radius = int(radius)
    verts = [(x, 1.0) for x in range(-radius, radius + 1)]
    edges = [(x, x + 1, 1.0) for x in range(-radius, radius)]
    return build_graph(verts, edges, truncation_boundary=(-radius, radius))


def star_graph(leaves: int, center_mu: float = 1.0, weight: float = 1.0) -> WeightedGraph:
    """Star with center 0 and leaves 1..leaves."""
    if leaves < 1:
        raise GraphError("a star needs at least one leaf")
    verts = [(0, center_mu)] + [(i, 1.0) for i in range(1, leaves + 1)]
    edges = [(0, i, weight) for i in range(1, leaves + 1)]
    return build_graph(verts, edges)


def _as_set(g: WeightedGraph, center) -> list[int]:
    if isinstance(center, (int, np.integer)):
        centers = [int(center)]
    else:
        centers = list(dict.fromkeys(int(c) for c in center))
    for c in centers:
        g.check_vertex(c)
    return centers


def _bfs(g: WeightedGraph, sources: Sequence[int], limit: int | None = None) -> dict[int, int]:
    dist = {s: 0 for s in sources}
    queue = deque(sources)
    while queue:
        x = queue.popleft()
        dx = dist[x]
        if limit is not None and dx >= limit:
            continue
        for y, _ in g.adjacency[x]:
            if y not in dist:
                dist[y] = dx + 1
                queue.append(y)
    return dist


def distance(g: WeightedGraph, x: int, y: int):
    """Combinatorial distance, or :data:`UNREACHABLE` across components."""
    g.check_vertex(x)
    g.check_vertex(y)
    if x == y:
        return 0
    dist = {x: 0}
    queue = deque([x])
    while queue:
        a = queue.popleft()
        for b, _ in g.adjacency[a]:
            if b not in dist:
                dist[b] = dist[a] + 1
                if b == y:
                    return dist[b]
                queue.append(b)
    return UNREACHABLE


def distances_from(g: WeightedGraph, p: int, limit: int | None = None) -> dict[int, int]:
    """All finite distances from ``p`` (optionally only those <= limit)."""
    g.check_vertex(p)
    return _bfs(g, [p], limit)


def ball(g: WeightedGraph, center, R: int) -> tuple[int, ...]:
    """B_R of a vertex or a vertex set, ordered by (distance, id)."""
    if R < 0:
        raise GraphError(f"ball radius must be >= 0, got {R}")
    dist = _bfs(g, _as_set(g, center), int(R))
    return tuple(sorted(dist, key=lambda v: (dist[v], v)))


def vertex_boundary(g: WeightedGraph, omega: Iterable[int]) -> tuple[int, ...]:
    """Vertices outside ``omega`` adjacent to it, sorted by id."""
    inside = set(_as_set(g, omega))
    out = {y for x in inside for y, _ in g.adjacency[x] if y not in inside}
    return tuple(sorted(out))


def degree(g: WeightedGraph, x: int) -> float:
    g.check_vertex(x)
    return sum(w for _, w in g.adjacency[x]) / g.mu[x]


def connected_components(g: WeightedGraph) -> list[tuple[int, ...]]:
    left = set(g.vertices)
    comps = []
    for v in g.vertices:
        if v in left:
            comp = _bfs(g, [v])
            left -= comp.keys()
            comps.append(tuple(sorted(comp)))
    return comps


def certify_degree_growth(
    g: WeightedGraph, p: int, alpha: float, D: float, radius: int
) -> GrowthCertificate:
    """Check Deg(x) <= D d(x,p)^alpha for all x != p with d(x,p) <= radius.

    Vertices outside p's component have no finite distance and are skipped;
    see :func:`connected_components` for per-component use.
    """
    if not 0 <= alpha <= 2:
        raise GraphError(f"alpha must lie in [0, 2], got {alpha}")
    if not D > 0:
        raise GraphError(f"D must be positive, got {D}")
    dist = distances_from(g, p, int(radius))
    reached = max(dist.values())
    d_min = 0.0
    bad = []
    for x, d in dist.items():
        if x == p:
            continue
        deg = degree(g, x)
        scale = float(d) ** alpha
        d_min = max(d_min, deg / scale)
        if deg > D * scale:
            bad.append(x)
    return GrowthCertificate(
        p=p,
        alpha=float(alpha),
        D=float(D),
        checked_radius=int(radius),
        holds=not bad,
        minimal_D=d_min,
        available_radius=reached,
        limited=reached < radius,
        violations=tuple(sorted(bad)),
    )


# -- JSON graph files ---------------------------------------------------------


class _Located(dict):
    line = 0


def _located_decoder() -> json.JSONDecoder:
    dec = json.JSONDecoder()

    def parse_object(s_and_end, *args):
        s, end = s_and_end
        obj, new_end = _json_decoder.JSONObject(s_and_end, *args)
        located = _Located(obj)
        located.line = s.count("\n", 0, end) + 1
        return located, new_end

    dec.parse_object = parse_object
    dec.scan_once = _json_scanner.py_make_scanner(dec)
    return dec


def loads_graph(text: str, source: str = "<string>") -> WeightedGraph:
    """Parse the JSON graph format.

    ``{"vertices": [{"id": int, "mu": num}, ...],
    "edges": [{"u": int, "v": int, "w": num}, ...]}`` plus an optional
    ``"truncation_boundary": [int, ...]``. Errors carry ``source:line``.
    """
    try:
        doc = _located_decoder().decode(text)
    except json.JSONDecodeError as exc:
        raise GraphError(f"{source}:{exc.lineno}: invalid JSON: {exc.msg}") from None
    if not isinstance(doc, dict) or "vertices" not in doc or "edges" not in doc:
        raise GraphError(f"{source}:1: expected an object with 'vertices' and 'edges'")

    def where(item) -> str:
        return f"{source}:{getattr(item, 'line', 1)}"

    def field_of(item, key, kind):
        if not isinstance(item, dict) or key not in item:
            raise GraphError(f"{where(item)}: missing field {key!r}")
        val = item[key]
        ok = isinstance(val, int) if kind is int else isinstance(val, (int, float))
        if isinstance(val, bool) or not ok:
            raise GraphError(f"{where(item)}: field {key!r} has invalid value {val!r}")
        return val

    verts, edges = [], []
    vg: set[int] = set()
    for item in doc["vertices"]:
        vid, m = field_of(item, "id", int), field_of(item, "mu", float)
        if vid in vg:
            raise GraphError(f"{where(item)}: duplicate vertex id {vid}")
        if not m > 0:
            raise GraphError(f"{where(item)}: vertex {vid}: measure mu={m} must be positive")
        vg.add(vid)
        verts.append((vid, m))
    seen: set[tuple[int, int]] = set()
    for item in doc["edges"]:
        e = (field_of(item, "u", int), field_of(item, "v", int), field_of(item, "w", float))
        try:
            _check_edge(e, vg, seen)
        except GraphError as exc:
            raise GraphError(f"{where(item)}: {exc}") from None
        edges.append(e)
    trunc = doc.get("truncation_boundary", [])
    try:
        return build_graph(verts, edges, trunc)
    except GraphError as exc:
        raise GraphError(f"{source}: {exc}") from None


def _check_edge(e, vertex_ids, seen) -> None:
    u, v, w = e
    for end in (u, v):
        if end not in vertex_ids:
            raise GraphError(f"edge ({u}, {v}): endpoint {end} is missing")
    if u == v:
        raise GraphError(f"edge ({u}, {v}): self-loop")
    key = (min(u, v), max(u, v))
    if key in seen:
        raise GraphError(f"edge ({u}, {v}): repeated edge")
    if not w > 0:
        raise GraphError(f"edge ({u}, {v}): weight w={w} must be positive")
    seen.add(key)


def load_graph(path) -> WeightedGraph:
    with open(path, encoding="utf-8") as fh:
        return loads_graph(fh.read(), source=str(path))


def graph_to_dict(g: WeightedGraph) -> dict:
    out = {
        "vertices": [{"id": v, "mu": g.mu[v]} for v in g.vertices],
        "edges": [{"u": u, "v": v, "w": w} for u, v, w in g.edges],
    }
    if g.truncation_boundary:
        out["truncation_boundary"] = sorted(g.truncation_boundary)
    return out
