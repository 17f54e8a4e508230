import json

import numpy as np
import pytest
from hypothesis import given, strategies as st

from conftest import DESK, SMALL, naive_mul, naive_orthogonal, same_point, space_id, space_of
from grgraph.errors import IsE1, NormOneUnavailable, NotAVertex
from grgraph.orthograph import adjacent, build_graph, canonicalize, is_vertex
from grgraph.ring_linalg import hyperbolic_swap, parse_matrix
from grgraph.suborbits import (
    ADJ,
    E1,
    NADJ_E2,
    OrbitLabel,
    classify,
    coincidence_check,
    listed_labels,
    move_to_e1,
    orbit_census,
    reduce_fallback,
    reduce_in_stabilizer,
    rep_vector,
)


def check_witness(space, w, fixes_e1):
    """Independent re-check with schoolbook arithmetic."""
    R = space.ring
    assert naive_orthogonal(space, w.matrix)
    image = naive_mul(R, [list(w.source.coords)], w.matrix)[0]
    assert same_point(R, image, w.target.coords)
    if fixes_e1:
        assert not np.any(w.matrix[0, 1:])


SPACES_FOR_LABELS = DESK + [(3, 3, 1, 1, 2, "1"), (3, 3, 1, 2, 1, "1"), (5, 2, 1, 1, 2, "1"), (3, 2, 1, 3, 1, "1")]


@pytest.mark.parametrize("t", SPACES_FOR_LABELS, ids=space_id)
def test_representatives_are_vertices(t):
    sp = space_of(*t)
    for label in listed_labels(sp) + [E1]:
        pt = rep_vector(sp, label)
        assert is_vertex(sp, pt.coords), label
    assert adjacent(sp, rep_vector(sp, E1).coords, rep_vector(sp, ADJ).coords)


def test_representatives_display():
    sp = space_of(3, 2, 1, 1, 2)
    assert rep_vector(sp, OrbitLabel("M1", r=1)).coords == (1, 0, 3, 0)
    assert rep_vector(sp, OrbitLabel("M2", r=1)).coords == (1, 0, 0, 3)
    sp = space_of(3, 2, 1, 2, 0)
    assert rep_vector(sp, OrbitLabel("NADJ_E1PQ", r=1, t=1, a="z")).coords == (1, 3, 0, 8 * 3 % 9)


def test_label_strings():
    assert str(OrbitLabel("N1", r=1)) == "N1(r=1)"
    assert str(OrbitLabel("NADJ_E1PQ", r=1, t=2, a="z")) == "NADJ_E1PQ(r=1,t=2,a=z)"
    assert str(ADJ) == "ADJ"


def test_classify_examples():
    sp = space_of(3, 2, 1, 1, 1)
    label, w = classify(sp, [1, 0, 3])
    assert label == OrbitLabel("N1", r=1)
    check_witness(sp, w, True)
    label, _ = classify(sp, [0, 1, 0])
    assert label == ADJ

    sp = space_of(3, 2, 1, 2, 0)
    label, w = classify(sp, [0, 1, 0, 0])
    assert label == NADJ_E2
    assert np.array_equal(w.matrix, np.eye(4, dtype=np.int64))
    label, _ = classify(sp, [1, 3, 0, 0])
    assert label == OrbitLabel("NADJ_E1P", r=1)

    sp = space_of(3, 2, 1, 1, 2)
    label, w = classify(sp, [1, 0, 3, 3])
    assert label.tag == "M3" and label.r == 1 and int(label.b) == 1
    check_witness(sp, w, True)


def test_move_to_e1_example():
    sp = space_of(3, 2, 1, 1, 1)
    w = move_to_e1(sp, [0, 1, 0])
    assert np.array_equal(w.matrix, hyperbolic_swap(sp))
    check_witness(sp, w, False)


@pytest.mark.parametrize("t", SMALL + [(3, 2, 1, 2, 1, "z"), (3, 2, 1, 3, 0, "1")], ids=space_id)
def test_every_vertex_certified(t):
    sp = space_of(*t)
    g = build_graph(sp)
    allowed = set(listed_labels(sp)) | {E1}
    step = max(1, g.n // 60)
    for i, row in enumerate(g.coords):
        label, w = classify(sp, row)
        assert label in allowed
        assert (label == ADJ) == g.is_adjacent(0, i)
        if i % step == 0:
            check_witness(sp, w, True)
            check_witness(sp, move_to_e1(sp, row), False)


@given(t=st.sampled_from([(3, 2, 1, 1, 2, "1"), (3, 2, 1, 2, 1, "1"), (3, 2, 2, 1, 1, "1"), (3, 3, 1, 1, 2, "1")]), data=st.data())
def test_label_invariant_under_rescaling(t, data):
    sp = space_of(*t)
    g = build_graph(sp)
    R = sp.ring
    i = data.draw(st.integers(0, g.n - 1))
    u = data.draw(st.integers(0, R.size - 1).filter(R.is_unit))
    v = g.coords[i]
    scaled = [R.mul(u, int(x)) for x in v]
    la, _ = classify(sp, v)
    lb, wb = classify(sp, scaled)
    assert la == lb
    assert wb.source == canonicalize(sp, v)


def test_errors():
    sp = space_of(3, 2, 1, 1, 1)
    with pytest.raises(IsE1):
        reduce_in_stabilizer(sp, [1, 0, 0])
    with pytest.raises(NotAVertex):
        classify(sp, [1, 1, 1])
    with pytest.raises(NotAVertex):
        move_to_e1(sp, [1, 1, 1])
    label, w = classify(sp, [2, 0, 0])
    assert label == E1


def _unequal_tail_vertices(sp):
    R = sp.ring
    g = build_graph(sp)
    out = []
    for row in g.coords:
        w0, w1 = int(row[2]), int(row[3])
        if not R.is_unit(int(row[1])) and w0 and w1 and R.valuation(w0) != R.valuation(w1):
            out.append(row)
    return out


def test_fallback_at_z27():
    sp = space_of(3, 3, 1, 1, 2)
    hard = _unequal_tail_vertices(sp)
    assert hard
    R = sp.ring
    for v in hard:
        with pytest.raises(NormOneUnavailable):
            reduce_in_stabilizer(sp, v)
        label, w = classify(sp, v)
        check_witness(sp, w, True)
        r, t = R.valuation(int(v[2])), R.valuation(int(v[3]))
        # -1 is a non-square mod 27, so M1(r) and M2(r) are one suborbit
        assert label.tag in ("M1", "M2")
        assert label.r == min(r, t)
        assert classify(sp, v)[0] == label


def test_fallback_depth_zero_hit():
    sp = space_of(3, 3, 1, 1, 2)
    target = rep_vector(sp, OrbitLabel("M1", r=1))
    label, w = reduce_fallback(sp, target.coords)
    assert label == OrbitLabel("M1", r=1)
    assert np.array_equal(w.matrix, np.eye(4, dtype=np.int64))


def test_norm_one_path_without_fallback():
    sp = space_of(5, 2, 1, 1, 2)
    g = build_graph(sp)
    R = sp.ring
    for row in g.coords:
        if not R.is_unit(int(row[1])) and int(row[2]) and int(row[3]):
            _, w = reduce_in_stabilizer(sp, row)
            check_witness(sp, w, True)


def test_census_small():
    sp = space_of(3, 2, 1, 1, 1)
    c = orbit_census(sp)
    assert {str(k): v for k, v in c.items()} == {"E1": 1, "ADJ": 9, "N1(r=1)": 2}


@pytest.mark.parametrize("t", DESK, ids=space_id)
def test_census_partitions_n(t):
    sp = space_of(*t)
    g = build_graph(sp)
    c = orbit_census(sp, g)
    assert sum(c.values()) == g.n
    assert c[ADJ] == int(g.degrees()[0])


def test_coincidence():
    sp = space_of(3, 2, 1, 1, 2)
    found = coincidence_check(sp)
    assert len(found) == 1
    src, dst, w = found[0]
    assert (str(src), str(dst)) == ("M1(r=1)", "M2(r=1)")
    check_witness(sp, w, True)
    assert w.source.coords == (1, 0, 3, 0)
    assert w.target.coords == (1, 0, 0, 3)
    assert coincidence_check(space_of(5, 2, 1, 1, 2)) == []
    with pytest.raises(ValueError):
        coincidence_check(space_of(3, 2, 1, 1, 1))


def test_witness_json_round_trip():
    sp = space_of(3, 2, 2, 1, 1)
    g = build_graph(sp)
    label, w = classify(sp, g.coords[-1])
    doc = json.loads(w.dumps(sp))
    assert set(doc) == {"source", "target", "label", "matrix"}
    assert doc["label"] == str(label)
    M = parse_matrix(sp.ring, doc["matrix"])
    assert np.array_equal(M, w.matrix)
