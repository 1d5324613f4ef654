from fractions import Fraction

import pytest
from hypothesis import given, settings, strategies as st

from reebcob.reeb import (
    EMPTY,
    DecodeError,
    InvalidGraphError,
    ReebGraph,
    Sigma,
    VertexModel,
    canonical_key,
    classify,
    decode,
    disjoint_union,
    encode,
    euler_characteristic,
    format_height,
    is_isomorphic,
    isomorphism,
    sigma,
    to_dot,
    to_height,
    validate,
)

RP2_PATH = ReebGraph({0: 0, 1: Fraction(1, 2), 2: 1}, [(0, 1), (1, 2)])
TORUS = ReebGraph({0: 0, 1: 1, 2: 2, 3: 3}, [(0, 1), (1, 2), (1, 2), (2, 3)])
EDGE = ReebGraph({0: 0, 1: 1}, [(0, 1)])


def codes(g):
    return [v.code for v in validate(g)]


# -- heights

@pytest.mark.parametrize("text,value", [
    ("0", Fraction(0)), ("0.25", Fraction(1, 4)), ("-1.5", Fraction(-3, 2)),
    ("1e-3", Fraction(1, 1000)), ("1/3", Fraction(1, 3)),
])
def test_to_height_parses_exactly(text, value):
    assert to_height(text) == value


@pytest.mark.parametrize("bad", ["nan", "inf", "abc", "1/0", True])
def test_to_height_rejects(bad):
    with pytest.raises((ValueError, TypeError)):
        to_height(bad)


@pytest.mark.parametrize("value,text", [
    (Fraction(0), "0"), (Fraction(1, 4), "0.25"), (Fraction(-3, 8), "-0.375"),
    (Fraction(1, 3), "1/3"), (Fraction(17), "17"), (Fraction(-1, 20), "-0.05"),
])
def test_format_height(value, text):
    assert format_height(value) == text


@given(st.fractions())
def test_format_height_round_trips(h):
    assert to_height(format_height(h)) == h


# -- validation

def test_single_edge_is_valid():
    assert validate(EDGE) == []
    assert [EDGE.model(v) for v in EDGE.vertices] == [VertexModel.MINIMUM, VertexModel.MAXIMUM]


def test_empty_graph_is_valid():
    assert validate(EMPTY) == []


def test_degree_three_all_up_has_no_model():
    g = ReebGraph({0: 0, 1: 1, 2: 2, 3: 3}, [(0, 1), (0, 2), (0, 3)])
    found = validate(g)
    assert [v.code for v in found if 0 in v.vertices] == ["no-model"]
    assert "no matching local model" in found[-1].message


def test_flat_edge_is_not_embedded():
    g = ReebGraph({0: "0.5", 1: "0.5"}, [(0, 1)])
    assert "edge-not-embedded" in codes(g)
    msg = next(v.message for v in validate(g) if v.code == "edge-not-embedded")
    assert "not embedded" in msg and "0.5" in msg


def test_dangling_edge_is_structural():
    g = ReebGraph({0: 0}, [(0, 7)])
    found = validate(g)
    assert found and all(v.structural for v in found)
    assert found[0].code == "dangling-edge"


def test_model_violations_are_not_structural():
    g = ReebGraph({0: 0, 1: 1, 2: 2, 3: 3}, [(0, 1), (0, 2), (0, 3)])
    assert not any(v.structural for v in validate(g))


def test_self_loop_and_degree_bounds():
    assert "self-loop" in codes(ReebGraph({0: 0, 1: 1}, [(0, 0), (0, 1)]))
    lone = ReebGraph({0: 0}, [])
    assert codes(lone) == ["degree-out-of-range"]
    star = ReebGraph({i: i for i in range(5)}, [(4, i) for i in range(4)])
    assert "degree-out-of-range" in codes(star)


def test_height_collision():
    g = ReebGraph({0: 0, 1: 1, 2: 0, 3: 2}, [(0, 1), (2, 3)])
    assert "height-collision" in codes(g)


# -- classification

def test_classify_examples():
    y_up = ReebGraph({0: 0, 1: 1, 2: 2, 3: 3}, [(0, 1), (1, 2), (1, 3)])
    assert classify(EDGE, 1) is VertexModel.MAXIMUM
    assert classify(y_up, 1) is VertexModel.FORK_UP
    assert classify(RP2_PATH, 1) is VertexModel.PASS_THROUGH
    assert VertexModel.FORK_UP.label == "Fork{+1}"
    assert VertexModel.MINIMUM.label == "Extremum{Up}"


def test_classify_unknown_vertex():
    with pytest.raises(KeyError):
        classify(EDGE, 5)


# -- invariants

def test_sigma_examples():
    assert sigma(EMPTY) == Sigma(0, 0)
    assert sigma(RP2_PATH) == Sigma(0, 1)
    # three upward forks, one downward fork, two pass-throughs
    g = ReebGraph(
        {0: 0, 1: 1, 2: 2, 3: 3, 4: 4, 5: 5, 6: 6, 7: 7, 8: 8, 9: 9, 10: 10, 11: 11},
        [(0, 1), (1, 2), (1, 3), (2, 4), (2, 5), (3, 6), (3, 7),
         (4, 8), (5, 8), (8, 9), (9, 10), (10, 11)],
    )
    assert validate(g) == []
    assert sigma(g) == Sigma(2, 0)
    assert sigma(g).as_tuple() == (2, 0)


def test_sigma_rejects_invalid():
    with pytest.raises(InvalidGraphError):
        sigma(ReebGraph({0: 0}, []))


def test_sigma_addition_is_mod_two():
    assert Sigma(1, 1) + Sigma(-3, 1) == Sigma(-2, 0)
    with pytest.raises(ValueError):
        Sigma(0, 2)


def test_euler_characteristic_examples():
    assert euler_characteristic(EDGE) == 2
    assert euler_characteristic(RP2_PATH) == 1
    assert euler_characteristic(TORUS) == 0


# -- isomorphism

def test_isomorphism_ignores_height_values():
    assert is_isomorphic(EDGE, ReebGraph({4: -5, 9: 17}, [(4, 9)]))
    other = ReebGraph({0: 0, 1: Fraction(9, 10), 2: 1}, [(0, 1), (1, 2)])
    assert is_isomorphic(RP2_PATH, other)


def test_isomorphism_respects_fork_sign():
    y_up = ReebGraph({0: 0, 1: 1, 2: 2, 3: 3}, [(0, 1), (1, 2), (1, 3)])
    y_down = ReebGraph({0: 0, 1: 1, 2: 2, 3: 3}, [(0, 2), (1, 2), (2, 3)])
    assert not is_isomorphic(y_up, y_down)
    assert canonical_key(y_up) != canonical_key(y_down)


def test_isomorphism_sees_multiplicity():
    path4 = ReebGraph({0: 0, 1: 1, 2: 2, 3: 3}, [(0, 1), (1, 2), (2, 3)])
    assert not is_isomorphic(TORUS, path4)


def test_isomorphism_map_preserves_edges():
    shuffled = ReebGraph({7: 10, 3: 11, 5: 12, 1: 20}, [(7, 3), (3, 5), (3, 5), (5, 1)])
    m = isomorphism(TORUS, shuffled)
    assert m == {0: 7, 1: 3, 2: 5, 3: 1}


def test_canonical_key_agrees_with_isomorphism():
    a = ReebGraph({0: 0, 1: 1, 2: 2, 3: 3, 4: 4}, [(0, 2), (1, 2), (2, 3), (3, 4)])
    b = ReebGraph({9: 0, 8: 1, 7: 2, 6: 3, 5: 4}, [(9, 7), (8, 7), (7, 6), (6, 5)])
    assert canonical_key(a) == canonical_key(b)


# -- union

def test_disjoint_union_examples():
    assert is_isomorphic(disjoint_union(RP2_PATH, EMPTY), RP2_PATH)
    double = disjoint_union(RP2_PATH, RP2_PATH)
    assert validate(double) == []
    assert sigma(double) == Sigma(0, 0)
    both = disjoint_union(EDGE, TORUS)
    assert sigma(both) == Sigma(0, 0)
    assert euler_characteristic(both) == 2


def test_disjoint_union_keeps_first_ids():
    u = disjoint_union(EDGE, TORUS)
    assert u.height(0) == 0 and u.height(1) == 1
    assert len(u) == 6 and len(u.components()) == 2


# -- documents

def test_round_trip_is_exact():
    g = ReebGraph({3: "0.1", 5: "2/3", 8: "-4"}, [(3, 5), (8, 3)])
    text = encode(g)
    assert decode(text) == g
    assert encode(decode(text)) == text
    assert decode(encode(EDGE)) == EDGE


def test_document_shape():
    text = encode(RP2_PATH)
    assert '"height": "0.5"' in text
    assert text.endswith("\n")


def test_decode_degree_four():
    doc = ('{"version": 1, "vertices": [' + ", ".join(
        f'{{"id": {i}, "height": "{i}"}}' for i in range(5)) + '], "edges": [[4,0],[4,1],[4,2],[4,3]]}')
    with pytest.raises(DecodeError, match="degree out of range"):
        decode(doc)


def test_decode_duplicate_ids():
    doc = '{"version": 1, "vertices": [{"id": 0, "height": "0"}, {"id": 0, "height": "1"}], "edges": []}'
    with pytest.raises(DecodeError, match="structural error") as err:
        decode(doc)
    assert err.value.where == "$.vertices[1].id"


def test_decode_positions():
    with pytest.raises(DecodeError, match="line 1 column"):
        decode("{not json")
    with pytest.raises(DecodeError) as err:
        decode('{"version": 1, "vertices": [{"id": 0, "height": 3}], "edges": []}')
    assert err.value.where == "$.vertices[0].height"
    with pytest.raises(DecodeError, match="unknown vertex"):
        decode('{"version": 1, "vertices": [{"id": 0, "height": "0"}], "edges": [[0, 2]]}')


def test_dot_output():
    g = ReebGraph({0: 0, 1: 1, 2: 2, 3: 3, 4: 4}, [(0, 1), (1, 2), (2, 3), (2, 4)])
    dot = to_dot(g)
    assert 'label="1@1"' in dot and "shape=square" in dot
    assert 'sign="+1"' in dot
    assert dot.startswith("graph reeb {")


@settings(max_examples=50)
@given(st.lists(st.fractions(), min_size=2, max_size=2, unique=True))
def test_single_edges_all_isomorphic(hs):
    assert is_isomorphic(EDGE, ReebGraph({0: hs[0], 1: hs[1]}, [(0, 1)]))
