import random

import pytest

from reebcob.normal_form import canonical
from reebcob.oracle import (
    all_graphs,
    bfs_path,
    completeness_report,
    invariance_failures,
    move_classes,
    random_graph,
)
from reebcob.reeb import VertexModel, canonical_key, is_isomorphic, model_counts, sigma, validate


# Counts of homotopy classes of graphs by vertex bound, frozen.
@pytest.mark.parametrize("bound,count", [(2, 2), (3, 3), (4, 8), (5, 17)])
def test_enumeration_counts(bound, count):
    assert len(all_graphs(bound)) == count


def test_enumeration_is_valid_and_distinct():
    reps = all_graphs(5)
    for key, g in reps.items():
        assert validate(g) == []
        assert canonical_key(g) == key


def test_four_vertex_graphs():
    reps = all_graphs(4)
    sigmas = sorted(sigma(g).as_tuple() for g in reps.values())
    # empty, edge, pass path, two pass-through paths, two edges, torus,
    # and the up/down forks
    assert sigmas == [(-1, 0), (0, 0), (0, 0), (0, 0), (0, 0), (0, 0), (0, 1), (1, 0)]


def test_random_graph_is_valid():
    rng = random.Random(7)
    for _ in range(200):
        g = random_graph(rng, 12)
        assert validate(g) == []
        assert 2 <= len(g) <= 12


def test_random_graph_fixed_size_and_no_pass():
    rng = random.Random(3)
    for _ in range(50):
        g = random_graph(rng, n_vertices=10, allow_pass=False)
        assert len(g) == 10
        assert model_counts(g)[VertexModel.PASS_THROUGH] == 0
        assert len(random_graph(rng, 9, allow_pass=False)) % 2 == 0
    with pytest.raises(ValueError, match="even"):
        random_graph(rng, n_vertices=9, allow_pass=False)


def test_random_graph_reproducible():
    assert random_graph(random.Random(11)) == random_graph(random.Random(11))


def test_invariance_on_samples():
    rng = random.Random(1)
    for _ in range(50):
        assert invariance_failures(random_graph(rng, 10)) == []


def test_completeness_five():
    report = completeness_report(5)
    assert report["ok"]
    assert report["graphs"] == 17
    assert report["components"] == report["sigma_values"]


def test_move_classes_merge_equal_sigma():
    reps, root = move_classes(4)
    edge = canonical_key(canonical(0, 0))
    torus = next(k for k, g in reps.items()
                 if len(g) == 4 and sigma(g).as_tuple() == (0, 0) and len(g.components()) == 1)
    assert root[edge] == root[torus]


def test_bfs_respects_bound():
    g = canonical(1, 0)
    assert bfs_path(g, canonical(-1, 0), 8, limit=2000) is None
    path = bfs_path(g, g, 4)
    assert len(path) == 1 and is_isomorphic(path[0], g)
