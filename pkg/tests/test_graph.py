import itertools

import pytest
from hypothesis import given
from hypothesis import strategies as st

from conftest import graphs
from wavegraph.graph import (
    UNREACHABLE,
    GraphError,
    ball,
    build_graph,
    certify_degree_growth,
    connected_components,
    degree,
    distance,
    graph_to_dict,
    line_graph_window,
    load_graph,
    loads_graph,
    star_graph,
    vertex_boundary,
)


def test_single_edge_degrees():
    g = build_graph([(0, 1.0), (1, 1.0)], [(0, 1, 1.0)])
    assert degree(g, 0) == degree(g, 1) == 1


def test_line_window_counts():
    g = line_graph_window(5)
    assert len(g.vertices) == 11 and len(g.edges) == 10
    assert line_graph_window(1).vertices == (-1, 0, 1)
    g3 = line_graph_window(3)
    assert degree(g3, 0) == 2 and degree(g3, 3) == 1
    assert g3.truncation_boundary == {-3, 3} and g3.is_truncated


@pytest.mark.parametrize(
    "verts, edges, match",
    [
        ([(0, 1.0)], [(0, 0, 1.0)], "self-loop"),
        ([(0, 1.0), (0, 2.0)], [], "duplicate vertex id 0"),
        ([(0, 1.0)], [(0, 7, 1.0)], "endpoint 7 is missing"),
        ([(0, 1.0), (1, 1.0)], [(0, 1, 0.0)], "weight"),
        ([(0, -1.0)], [], "measure"),
        ([(0, 1.0), (1, 1.0)], [(0, 1, 1.0), (1, 0, 2.0)], "repeated edge"),
    ],
)
def test_build_rejects(verts, edges, match):
    with pytest.raises(GraphError, match=match):
        build_graph(verts, edges)


def test_window_radius_zero():
    with pytest.raises(GraphError):
        line_graph_window(0)


def test_distance_examples():
    g = line_graph_window(5)
    assert distance(g, -2, 3) == 5
    assert distance(g, 4, 4) == 0
    s = star_graph(3)
    assert distance(s, 1, 2) == 2


def test_unreachable_is_not_a_number():
    g = build_graph([(0, 1.0), (1, 1.0), (2, 1.0)], [(0, 1, 1.0)])
    d = distance(g, 0, 2)
    assert d is UNREACHABLE and not d
    assert connected_components(g) == [(0, 1), (2,)]
    assert degree(g, 2) == 0


def test_ball_and_boundary_examples():
    g = line_graph_window(5)
    assert set(ball(g, 0, 2)) == {-2, -1, 0, 1, 2}
    assert ball(g, 3, 0) == (3,)
    assert vertex_boundary(g, [0]) == (-1, 1)
    assert vertex_boundary(g, [0, 1]) == (-1, 2)
    assert vertex_boundary(g, g.vertices) == ()


def test_star_center_degree():
    s = star_graph(3, center_mu=2.0)
    assert degree(s, 0) == 1.5


def test_growth_certificate_examples():
    g = line_graph_window(20)
    assert certify_degree_growth(g, 0, 0, 2, 10).holds
    bad = certify_degree_growth(g, 0, 0, 1.9, 10)
    assert not bad.holds and bad.violations
    assert certify_degree_growth(star_graph(10), 0, 0, 10, 3).holds


def test_growth_certificate_limited():
    cert = certify_degree_growth(line_graph_window(3), 0, 0, 2, 10)
    assert cert.limited and cert.available_radius == 3


@given(graphs(), st.integers(0, 3), st.integers(0, 3), st.data())
def test_ball_monotone(g, r1, r2, data):
    K = data.draw(st.lists(st.sampled_from(g.vertices), min_size=1, max_size=3))
    lo, hi = sorted((r1, r2))
    small, big = set(ball(g, K, lo)), set(ball(g, K, hi))
    assert small <= big and set(K) <= set(ball(g, K, 1))


@given(graphs(), st.data())
def test_boundary_properties(g, data):
    omega = data.draw(st.sets(st.sampled_from(g.vertices), min_size=1))
    bd = vertex_boundary(g, omega)
    assert not set(bd) & omega
    for y in bd:
        assert any(z in omega for z, _ in g.adjacency[y])


@given(graphs(max_vertices=10))
def test_distance_is_metric(g):
    V = g.vertices
    for x, y in itertools.product(V, V):
        assert distance(g, x, y) == distance(g, y, x)
        assert (distance(g, x, y) == 0) == (x == y)
    for x, y, z in itertools.product(V[:5], V[:5], V):
        assert distance(g, x, y) <= distance(g, x, z) + distance(g, z, y)


@given(graphs(), st.floats(0, 2))
def test_minimal_D_is_sharp(g, alpha):
    p = g.vertices[0]
    cert = certify_degree_growth(g, p, alpha, 1.0, 4)
    d_min = cert.minimal_D
    assert certify_degree_growth(g, p, alpha, d_min, 4).holds
    assert not certify_degree_growth(g, p, alpha, d_min * (1 - 1e-9), 4).holds


def test_json_roundtrip(tmp_path):
    import json

    g = star_graph(4, center_mu=2.5, weight=0.5)
    path = tmp_path / "g.json"
    path.write_text(json.dumps(graph_to_dict(g), indent=1))
    h = load_graph(path)
    assert h.vertices == g.vertices and h.edges == g.edges and h.mu == g.mu


BAD_FILE = """{
  "vertices": [
    {"id": 0, "mu": 1},
    {"id": 1, "mu": 1}
  ],
  "edges": [
    {"u": 0, "v": 1, "w": 1},
    {"u": 1, "v": 1, "w": 1}
  ]
}"""


def test_loader_reports_line():
    with pytest.raises(GraphError, match=r"g.json:8: edge \(1, 1\): self-loop"):
        loads_graph(BAD_FILE, "g.json")


@pytest.mark.parametrize(
    "text, match",
    [
        ('{"vertices": [\n{"id": 0, "mu": 1},\n{"id": 0, "mu": 2}], "edges": []}', ":3: duplicate vertex id 0"),
        ('{"vertices": [\n{"id": 0}], "edges": []}', ":2: missing field 'mu'"),
        ('{"vertices": [{"id": 0, "mu": 1}],\n"edges": [\n{"u": 0, "v": 4, "w": 1}]}', ":3: .*endpoint 4"),
        ('{"vertices": [{"id": 0, "mu": 1}, {"id": 1, "mu": 1}],\n"edges": [\n\n{"u": 0, "v": 1, "w": -2}]}', ":4: .*weight"),
        ('{"vertices": [\n', ":2: invalid JSON"),
        ('[]', "expected an object"),
    ],
)
def test_loader_errors(text, match):
    with pytest.raises(GraphError, match=match):
        loads_graph(text)


def test_loader_truncation_boundary():
    g = loads_graph('{"vertices": [{"id": 0, "mu": 1}, {"id": 1, "mu": 1}], '
                    '"edges": [{"u": 0, "v": 1, "w": 1}], "truncation_boundary": [1]}')
    assert g.truncation_boundary == {1}


def test_graph_is_immutable():
    g = line_graph_window(2)
    with pytest.raises(AttributeError):
        g.vertices = ()
