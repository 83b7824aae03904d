import random

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from conftest import nat, nat_matrices, square_matrices, to_np
from shifteq.errors import IncompatibleIndexSets
from shifteq.matrices import mat_pow
from shifteq.pathspace import (Edge, PathIso, compose, compose_all, cross, edge_set, endpoints, flatten,
                               from_power_edge, identity_iso, invert, lexicographic_matching, lift_power,
                               path_key, path_space, to_power_edge, validate_path_iso)


def _shuffled_iso(family, seed):
    """Random endpoint-preserving bijection of a path space onto itself."""
    rng = random.Random(seed)
    paths = path_space(family)
    classes = {}
    for p in paths:
        classes.setdefault(endpoints(p), []).append(p)
    table = {}
    for cls in classes.values():
        img = cls[:]
        rng.shuffle(img)
        table.update(zip(cls, img))
    return PathIso(family, family, table)


@given(st.data())
def test_path_space_size_is_matrix_product_total(data):
    A = data.draw(nat_matrices(row_name="V", col_name="W", max_entry=2))
    B = data.draw(nat_matrices(rows=A.cols.size, row_name="W", col_name="U", max_entry=2))
    C = data.draw(nat_matrices(rows=B.cols.size, row_name="U", col_name="V", max_entry=2))
    ps = path_space((A, B, C))
    assert len(ps) == int((to_np(A) @ to_np(B) @ to_np(C)).sum())
    assert len(set(ps)) == len(ps)
    assert list(ps) == sorted(ps, key=path_key)


def test_edge_set_order_and_counts():
    A = nat([[0, 2], [1, 0]])
    assert edge_set(A) == (Edge(0, 0, 1), Edge(0, 1, 1), Edge(1, 0, 0))


def test_path_space_rejects_inadmissible_family():
    A = nat([[1]], "V")
    B = nat([[1]], "W")
    with pytest.raises(IncompatibleIndexSets):
        path_space((A, B))


@given(square_matrices(max_size=3, max_entry=2), st.integers(0, 1000))
def test_iso_algebra(A, seed):
    fam = (A, A)
    f = _shuffled_iso(fam, seed)
    g = _shuffled_iso(fam, seed + 1)
    assert validate_path_iso(f)
    assert compose(f, invert(f)) == identity_iso(fam)
    assert compose_all(f, g, invert(g)) == f
    assert validate_path_iso(cross(f, identity_iso((A,))))


def test_validation_failure_kinds():
    A = nat([[2, 1], [1, 1]])
    fam = (A,)
    good = dict(identity_iso(fam).table)
    paths = path_space(fam)

    missing = dict(good)
    del missing[paths[0]]
    assert validate_path_iso(PathIso(fam, fam, missing)).kind == "totality"

    wrong_range = dict(good)
    # (0,0,0) -> (0,0,1) keeps the source but moves the range
    wrong_range[paths[0]] = paths[2]
    rep = validate_path_iso(PathIso(fam, fam, wrong_range))
    assert rep.kind == "range" and rep.path == paths[0]

    doubled = dict(good)
    doubled[paths[1]] = paths[0]
    rep = validate_path_iso(PathIso(fam, fam, doubled))
    assert rep.kind == "bijectivity"

    stray = dict(good)
    stray[(Edge(1, 5, 1),)] = paths[-1]
    assert not validate_path_iso(PathIso(fam, fam, stray))

    wrong_source = dict(good)
    wrong_source[paths[2]] = paths[3]
    assert validate_path_iso(PathIso(fam, fam, wrong_source)).kind == "source"


def test_lift_power_one_is_identity_operation():
    from shifteq.shifts import build_lag1_compatible
    A = nat([[1, 1], [1, 1]])
    R = nat([[1], [1]], "V", "W")
    S = nat([[1, 1]], "W", "V")
    B = nat([[2]], "W")
    cs = build_lag1_compatible(A, B, R, S)
    assert lift_power(cs.phi_R, 1) is cs.phi_R
    phi2 = lift_power(cs.phi_R, 2)
    assert validate_path_iso(phi2)
    assert phi2.codomain == (R, B, B)


@given(square_matrices(max_size=3, max_entry=2), st.integers(2, 3))
def test_power_edges_roundtrip(A, j):
    P = mat_pow(A, j)
    seen = set()
    for p in path_space((A,) * j):
        e = to_power_edge(p, A)
        assert e in set(edge_set(P))
        assert from_power_edge(e, A, j) == p
        seen.add(e)
    assert len(seen) == P.total()


def test_flatten():
    A = nat([[1, 1], [1, 0]])
    A2 = mat_pow(A, 2)
    for p in path_space((A2, A)):
        flat = flatten(p, (A2, A), base=A, exponents=(2, 1))
        assert len(flat) == 3 and flat[0].v == p[0].v and flat[-1].w == p[-1].w
    with pytest.raises(IncompatibleIndexSets):
        flatten(path_space((A2, A))[0], (A2, A), base=A)


@given(st.data())
def test_lexicographic_matching_preserves_endpoints(data):
    A = data.draw(nat_matrices(row_name="V", col_name="W", max_entry=2))
    B = data.draw(nat_matrices(rows=A.cols.size, cols=A.rows.size, row_name="W", col_name="V", max_entry=2))
    AB = type(A).from_rows(np.asarray(to_np(A) @ to_np(B)).tolist(), "V")
    table = lexicographic_matching(path_space((A, B)), path_space((AB,)))
    assert validate_path_iso(PathIso((A, B), (AB,), table))
