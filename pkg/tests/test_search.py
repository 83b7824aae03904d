import random

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from conftest import DATA, nat
from oracles import elementary_oracle, se_oracle_invertible
from shifteq import artifacts
from shifteq.corpus import a_k, b_k, ex58
from shifteq.errors import NotAnSEWitness
from shifteq.generate import random_elementary_pair
from shifteq.matrices import IndexSet, NatMatrix, mat_mul, mat_pow, same_entries
from shifteq.search import (SearchCaps, Status, check_certificate, default_node_budget, factor_elementary,
                            search_aligned, search_se, search_se_upto, search_sse_chain)
from shifteq.shifts import classify


def _se_holds(A, B, R, S, m):
    return (same_entries(mat_mul(A, R), mat_mul(R, B)) and same_entries(mat_mul(B, S), mat_mul(S, A))
            and same_entries(mat_mul(R, S), mat_pow(A, m)) and same_entries(mat_mul(S, R), mat_pow(B, m)))


def test_example_triple():
    A, B, C = ex58()
    for X, Y in ((A, B), (B, C)):
        out = factor_elementary(X, Y)
        assert out.status is Status.FOUND and out.exit_code == 0
        R, S = out.witness
        assert same_entries(mat_mul(R, S), X) and same_entries(mat_mul(S, R), Y)
    out = factor_elementary(A, C)
    assert out.status is Status.NONE and out.exit_code == 1
    assert out.certificate == {"kind": "rank", "matrix": "A", "lag": 1, "rank": 2, "inner_dim": 1}
    assert check_certificate(A, C, out.certificate)


def test_trace_certificate():
    A = nat([[2]])
    B = nat([[3]], "W")
    out = factor_elementary(A, B)
    assert out.status is Status.NONE and out.certificate["kind"] == "trace"
    assert check_certificate(A, B, out.certificate)
    assert not check_certificate(A, nat([[2]], "W"), out.certificate)
    C = nat([[1, 1], [1, 0]], "W")
    out = factor_elementary(A, C)
    assert out.certificate["kind"] == "rank" and check_certificate(A, C, out.certificate)


@pytest.mark.parametrize("seed", range(30))
def test_constructed_pairs_are_always_found(seed):
    A, B, R, S = random_elementary_pair(random.Random(seed), max_entry=4)
    out = factor_elementary(A, B)
    assert out.status is Status.FOUND
    R2, S2 = out.witness
    assert same_entries(mat_mul(R2, S2), A) and same_entries(mat_mul(S2, R2), B)


@given(st.lists(st.integers(0, 2), min_size=4, max_size=4), st.lists(st.integers(0, 2), min_size=4, max_size=4))
def test_two_by_two_against_oracle(a, b):
    A = nat([a[:2], a[2:]])
    B = nat([b[:2], b[2:]], "W")
    out = factor_elementary(A, B)
    assert out.status is not Status.UNKNOWN
    assert (out.status is Status.FOUND) == elementary_oracle(A.data, B.data)


def test_entry_cap_turns_none_into_unknown():
    A = nat([[5]])
    B = nat([[5]], "W")
    assert factor_elementary(A, B).status is Status.FOUND
    out = factor_elementary(A, B, SearchCaps(entry_cap=1))
    assert out.status is Status.UNKNOWN and out.certificate["kind"] == "cap"


def test_node_budget_from_environment(monkeypatch):
    monkeypatch.setenv("SHIFTEQ_NODE_BUDGET", "3")
    assert default_node_budget() == 3
    A, B, _ = ex58()
    assert factor_elementary(A, B).status is Status.UNKNOWN
    monkeypatch.setenv("SHIFTEQ_NODE_BUDGET", "many")
    with pytest.raises(ValueError):
        default_node_budget()


def test_search_se_finds_self_equivalence_and_verifies():
    A, B, _ = ex58()
    out = search_se(A, A.relabel(IndexSet("W", 3), IndexSet("W", 3)), 1)
    assert out.status is Status.FOUND
    out = search_se_upto(A, B)
    assert out.status is Status.FOUND
    R, S = out.witness
    assert _se_holds(A, B, R, S, out.certificate["lag"])


def test_a3_b3_outcome_is_pinned():
    A, B = a_k(3), b_k(3)
    out = search_se_upto(A, B, SearchCaps(entry_cap=12, max_lag=3))
    assert out.status is Status.UNKNOWN
    per_lag = [c["status"] for c in out.certificate["per_lag"]]
    assert per_lag == ["NONE", "NONE", "UNKNOWN"]
    pinned = artifacts.load_artifact(DATA / "a3b3_se_cap12.json").payload
    assert pinned.status is out.status and pinned.certificate == out.certificate


def test_a3_b3_lag_three_witness():
    A, B = a_k(3), b_k(3)
    w = artifacts.load_artifact(DATA / "a3b3_se_lag3_witness.json").payload
    A2, B2, R, S, m = w
    assert m == 3 and same_entries(A2, A) and same_entries(B2, B)
    assert _se_holds(A, B, R, S, 3)
    out = search_se(A, B, 3, SearchCaps(entry_cap=16))
    assert out.status is Status.FOUND and out.witness == (R, S)


def test_a3_b3_against_invertibility_oracle():
    A, B = np.array([[1, 3], [2, 1]]), np.array([[1, 6], [1, 1]])
    assert se_oracle_invertible(A, B, 1, 20) == []
    assert se_oracle_invertible(A, B, 2, 20) == []
    sols = se_oracle_invertible(A, B, 3, 20)
    assert sorted(sols) == [([[1, 3], [1, 2]], [[16, 3], [1, 8]]), ([[8, 3], [1, 16]], [[2, 3], [1, 1]])]
    # the smallest witness needs entry 16, above the default cap
    assert min(max(max(map(max, R)), max(map(max, S))) for R, S in sols) == 16


def test_se_none_only_with_certificate():
    A = nat([[2]])
    B = nat([[3]], "W")
    out = search_se_upto(A, B)
    assert out.status is Status.NONE
    assert all(c["status"] == "NONE" for c in out.certificate["per_lag"])


def test_sse_chain_through_the_example():
    A, B, C = ex58()
    out = search_sse_chain(A, C, SearchCaps(max_lag=2))
    assert out.status is Status.FOUND and out.witness.lag == 2
    assert out.witness.verify()
    assert search_sse_chain(A, A).witness.lag == 0
    out = search_sse_chain(A, C, SearchCaps(max_lag=1))
    assert out.status is Status.UNKNOWN


def test_search_aligned_recovers_an_aligned_shift():
    A, B, _ = ex58()
    R, S = factor_elementary(A, B).witness
    out = search_aligned(A, B, 1, R, S)
    assert out.status is Status.FOUND
    assert classify(out.witness).flags == (True, True, True)
    R2, S2 = search_se(A, B, 2).witness
    out = search_aligned(A, B, 2, R2, S2)
    assert out.status is Status.FOUND and classify(out.witness).aligned
    with pytest.raises(NotAnSEWitness):
        search_aligned(A, B, 2, R, S)
