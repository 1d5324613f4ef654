import random

import pytest

from reebcob import fixtures, oracle
from reebcob.moves import Homotopy, MoveTrace
from reebcob.normal_form import canonical, normalize
from reebcob.reeb import (
    EMPTY,
    ReebGraph,
    VertexModel,
    disjoint_union,
    is_isomorphic,
    model_counts,
    sigma,
    validate,
)
from reebcob.surface import extract_reeb


def test_canonical_trivial_class_is_single_edge():
    assert canonical(0, 0) == ReebGraph({0: 0, 1: 1}, [(0, 1)])


def test_canonical_projective_class():
    g = canonical(0, 1)
    assert sigma(g).as_tuple() == (0, 1)
    assert model_counts(g)[VertexModel.PASS_THROUGH] == 1


def test_canonical_negative_with_pass():
    g = canonical(-3, 1)
    counts = model_counts(g)
    assert counts[VertexModel.FORK_DOWN] == 3
    assert counts[VertexModel.FORK_UP] == 0
    assert counts[VertexModel.PASS_THROUGH] == 1
    assert sigma(g).as_tuple() == (-3, 1)


@pytest.mark.parametrize("n", range(-6, 7))
@pytest.mark.parametrize("d", [0, 1])
def test_canonical_shape(n, d):
    g = canonical(n, d)
    assert validate(g) == []
    assert sigma(g).as_tuple() == (n, d)
    assert len(g.components()) == 1
    forks = [v for v in g.vertices if g.model(v).is_fork]
    assert len(forks) == abs(n)
    # all extrema except one on the far side of the forks
    counts = model_counts(g)
    assert counts[VertexModel.MINIMUM] + counts[VertexModel.MAXIMUM] == abs(n) + 2


def test_canonical_positive_layout():
    g = canonical(2, 1)
    assert g.directed_edges() == [(0, 1), (1, 2), (2, 3), (2, 5), (3, 4), (3, 6)]


def test_canonical_rejects_bad_parity():
    with pytest.raises(ValueError):
        canonical(1, 2)


def test_normalize_single_edge_needs_no_moves():
    g = ReebGraph({0: -5, 1: 17}, [(0, 1)])
    out, trace = normalize(g)
    assert out == canonical(0, 0)
    assert trace.moves == []
    assert all(isinstance(s, Homotopy) for s in trace.steps)


def test_normalize_empty_graph_creates_the_edge():
    out, trace = normalize(EMPTY)
    assert out == canonical(0, 0)
    assert [(m.kind, m.direction) for m in trace.moves] == [("a", "forward")]


def test_two_projective_planes_cancel():
    s, f = fixtures.load("rp2")
    g = extract_reeb(s, f).graph
    out, trace = normalize(disjoint_union(g, g))
    assert is_isomorphic(out, canonical(0, 0))
    kinds = [m.kind for m in trace.moves]
    assert "i" in kinds
    trace.replay()


def test_torus_graph_normalizes_to_edge():
    s, f = fixtures.load("torus")
    out, trace = normalize(extract_reeb(s, f).graph)
    assert is_isomorphic(out, canonical(0, 0))
    assert [m.kind for m in trace.moves] == ["c"]


def test_normalize_random_graphs():
    rng = random.Random(8)
    for _ in range(150):
        g = oracle.random_graph(rng, 12)
        out, trace = normalize(g)
        assert out == trace.end
        assert is_isomorphic(out, canonical(*sigma(g).as_tuple()))
        assert dict(out.heights) == {
            v: h for v, h in zip(sorted(out.heights, key=out.height), sorted(canonical(*sigma(g).as_tuple()).heights.values()))
        }
        assert MoveTrace.loads(trace.dumps()).replay() == out


def test_normalize_is_deterministic():
    g = oracle.random_graph(random.Random(1), 12)
    assert normalize(g)[1].dumps() == normalize(g)[1].dumps()
