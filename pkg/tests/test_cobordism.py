import math

import pytest
from hypothesis import given, strategies as st

from reebcob import fixtures
from reebcob.cobordism import (
    ZERO,
    CobordismClass,
    are_cobordant,
    class_of_graph,
    class_of_morse,
    group_add,
    group_neg,
    order,
    realize,
    realize_surface,
)
from reebcob.normal_form import canonical
from reebcob.oracle import bfs_path
from reebcob.reeb import ReebGraph, disjoint_union, is_isomorphic
from reebcob.surface import euler_char, extract_reeb, orientable

classes = st.builds(CobordismClass, st.integers(-20, 20), st.integers(0, 1))

TORUS = ReebGraph({0: 0, 1: 1, 2: 2, 3: 3}, [(0, 1), (1, 2), (1, 2), (2, 3)])
EDGE = canonical(0, 0)


@given(classes, classes, classes)
def test_group_laws(a, b, c):
    assert group_add(a, b) == group_add(b, a)
    assert group_add(group_add(a, b), c) == group_add(a, group_add(b, c))
    assert group_add(a, ZERO) == a
    assert group_add(a, group_neg(a)) == ZERO
    assert a - b == a + (-b)


def test_torsion_wraps():
    assert CobordismClass(0, 1) + CobordismClass(0, 1) == ZERO
    assert CobordismClass(3, 5) == CobordismClass(3, 1)


@pytest.mark.parametrize("c,n", [((0, 0), 1), ((0, 1), 2), ((1, 0), math.inf), ((-2, 1), math.inf)])
def test_order(c, n):
    assert order(CobordismClass(*c)) == n


def test_json():
    assert CobordismClass(-3, 1).to_json() == {"t": -3, "d": 1}
    assert CobordismClass.from_json({"t": 4, "d": 0}) == CobordismClass(4, 0)
    with pytest.raises(ValueError):
        CobordismClass.from_json({"t": 4, "d": 2})
    with pytest.raises(ValueError):
        CobordismClass.from_json({"t": "4", "d": 0})


def test_graph_classes():
    assert class_of_graph(canonical(5, 1)) == CobordismClass(5, 1)
    assert class_of_graph(ReebGraph({}, [])) == ZERO
    assert class_of_graph(TORUS) == ZERO


@pytest.mark.parametrize("name,cls", [
    ("sphere", (0, 0)), ("wiggly_sphere", (1, 0)), ("torus", (0, 0)), ("rp2", (0, 1)), ("klein", (0, 0)),
])
def test_fixture_classes(name, cls):
    assert class_of_morse(*fixtures.load(name)) == CobordismClass(*cls)


def test_cobordant_with_certificate():
    same, cert = are_cobordant(TORUS, EDGE)
    assert same and cert.check()
    assert is_isomorphic(cert.canonical, EDGE)
    assert cert.first.start == TORUS and cert.second.start == EDGE


def test_not_cobordant():
    assert are_cobordant(canonical(0, 1), EDGE) == (False, None)
    assert are_cobordant(canonical(1, 0), canonical(-1, 0)) == (False, None)


def test_torus_reaches_edge_by_search():
    # independent of the normalizer: plain breadth-first search over moves
    path = bfs_path(TORUS, EDGE, max_vertices=6)
    assert path is not None
    assert path[0] == TORUS and is_isomorphic(path[-1], EDGE)


def test_doubled_projective_plane():
    g = extract_reeb(*fixtures.load("rp2")).graph
    same, cert = are_cobordant(disjoint_union(g, g), EDGE)
    assert same and cert.check()


@pytest.mark.parametrize("t", range(-5, 6))
@pytest.mark.parametrize("d", (0, 1))
def test_realize(t, d):
    c = CobordismClass(t, d)
    assert class_of_graph(realize(c)) == c
    s, f = realize_surface(c)
    assert class_of_morse(s, f) == c


def test_realize_surface_shape():
    s, _ = realize_surface(CobordismClass(-2, 1))
    assert euler_char(s) == 2 + 2 + 1
    assert not orientable(s)
    s, f = realize_surface(ZERO)
    assert s == fixtures.load("sphere")[0] and f == fixtures.load("sphere")[1]
