"""Bounded exhaustive searches with certificates.

Every search answers FOUND (with a re-verified witness), NONE (with a
certificate that the bounded space was exhausted and that no bound was
imposed by a cap) or UNKNOWN (a cap or the node budget cut the search).
"""

from __future__ import annotations

import itertools
import os
from dataclasses import dataclass, field
from enum import Enum
from typing import Iterator, Sequence

from .errors import NotAnSEWitness, NotSquare
from .matrices import (
    IndexSet,
    NatMatrix,
    identity,
    is_essential,
    mat_mul,
    mat_pow,
    rank_rational,
    same_entries,
    trace,
)
from .pathspace import PathIso, endpoints, path_space
from .shifts import ConcreteShift, classify, validate_concrete_shift

DEFAULT_NODE_BUDGET = 2_000_000


def default_node_budget() -> int:
    raw = os.environ.get("SHIFTEQ_NODE_BUDGET")
    if raw:
        try:
            value = int(raw)
        except ValueError:
            raise ValueError(f"SHIFTEQ_NODE_BUDGET must be an integer, got {raw!r}") from None
        if value < 1:
            raise ValueError("SHIFTEQ_NODE_BUDGET must be positive")
        return value
    return DEFAULT_NODE_BUDGET


@dataclass(frozen=True)
class SearchCaps:
    entry_cap: int = 12
    inner_dims: tuple[int, int] = (1, 3)
    max_lag: int = 3
    node_budget: int = field(default_factory=default_node_budget)

    def __post_init__(self) -> None:
        lo, hi = self.inner_dims
        for name, v in (("entry_cap", self.entry_cap), ("max_lag", self.max_lag),
                        ("node_budget", self.node_budget), ("inner_dims", lo)):
            if not isinstance(v, int) or v < 1:
                raise ValueError(f"{name} must be a positive integer")
        if hi < lo:
            raise ValueError("inner_dims upper limit is below the lower limit")


class Status(str, Enum):
    FOUND = "FOUND"
    NONE = "NONE"
    UNKNOWN = "UNKNOWN"


@dataclass(frozen=True)
class SearchOutcome:
    status: Status
    witness: object = None
    certificate: dict | None = None
    nodes: int = 0

    @property
    def exit_code(self) -> int:
        return {Status.FOUND: 0, Status.NONE: 1, Status.UNKNOWN: 2}[self.status]


class _BudgetExceeded(Exception):
    pass


class _Counter:
    __slots__ = ("n", "budget")

    def __init__(self, budget: int):
        self.n = 0
        self.budget = budget

    def tick(self, k: int = 1) -> None:
        self.n += k
        if self.n > self.budget:
            raise _BudgetExceeded


@dataclass(frozen=True)
class SSEChain:
    """``A = R_1 S_1``, ``S_i R_i = R_{i+1} S_{i+1}``, ``S_m R_m = B``.

    Matrices may be :class:`~shifteq.matrices.CardMatrix` inside chain
    documents; products then use cardinal arithmetic.
    """

    A: object
    B: object
    steps: tuple = ()

    def __post_init__(self) -> None:
        object.__setattr__(self, "steps", tuple((R, S) for R, S in self.steps))

    @property
    def lag(self) -> int:
        return len(self.steps)

    def levels(self) -> list:
        """``[A, X_1, ..., X_{m-1}, B]`` computed from the steps."""
        from .matrices import product
        if not self.steps:
            return [self.A]
        out = [product([R, S]) for R, S in self.steps]
        out.append(product([self.steps[-1][1], self.steps[-1][0]]))
        return out

    def failures(self) -> list[str]:
        from .matrices import product
        errs = []
        if not self.steps:
            if not same_entries(self.A, self.B):
                errs.append("empty chain with A != B")
            return errs
        try:
            if not same_entries(product(self.steps[0]), self.A):
                errs.append("A != R_1 S_1")
            for i in range(len(self.steps) - 1):
                R, S = self.steps[i]
                R2, S2 = self.steps[i + 1]
                if not same_entries(product([S, R]), product([R2, S2])):
                    errs.append(f"S_{i + 1} R_{i + 1} != R_{i + 2} S_{i + 2}")
            R, S = self.steps[-1]
            if not same_entries(product([S, R]), self.B):
                errs.append(f"S_{len(self.steps)} R_{len(self.steps)} != B")
        except Exception as exc:
            errs.append(f"shape: {exc}")
        return errs

    def verify(self) -> bool:
        return not self.failures()

    def reversed(self) -> "SSEChain":
        return SSEChain(self.B, self.A, tuple((S, R) for R, S in reversed(self.steps)))


# ---------------------------------------------------------------------------
# certificates shared by the matrix searches


def trace_certificate(A: NatMatrix, B: NatMatrix) -> dict | None:
    """Unequal traces of some power rule out any shift equivalence."""
    for p in range(1, A.rows.size + B.rows.size + 1):
        ta, tb = trace(mat_pow(A, p)), trace(mat_pow(B, p))
        if ta != tb:
            return {"kind": "trace", "power": p, "trace_A": ta, "trace_B": tb}
    return None


def rank_certificate(X: NatMatrix, Y: NatMatrix, inner_X: int, inner_Y: int, lag: int = 1) -> dict | None:
    rx = rank_rational(X)
    if rx > inner_X:
        return {"kind": "rank", "matrix": "A", "lag": lag, "rank": rx, "inner_dim": inner_X}
    ry = rank_rational(Y)
    if ry > inner_Y:
        return {"kind": "rank", "matrix": "B", "lag": lag, "rank": ry, "inner_dim": inner_Y}
    return None


def check_certificate(A: NatMatrix, B: NatMatrix, cert: dict) -> bool:
    """Independently re-check a rank or trace certificate."""
    kind = cert.get("kind")
    if kind == "trace":
        p = cert["power"]
        return trace(mat_pow(A, p)) == cert["trace_A"] != cert["trace_B"] == trace(mat_pow(B, p))
    if kind == "rank":
        m = cert.get("lag", 1)
        X, other = (A, B) if cert["matrix"] == "A" else (B, A)
        return (rank_rational(mat_pow(X, m)) == cert["rank"] > cert["inner_dim"]
                and cert["inner_dim"] == other.rows.size)
    return False


# ---------------------------------------------------------------------------
# elementary factorizations


def _row_max(M: Sequence[Sequence[int]], i: int) -> int:
    return max(M[i], default=0)


def _col_max(M: Sequence[Sequence[int]], j: int) -> int:
    return max((r[j] for r in M), default=0)


def elementary_bounds(A: NatMatrix, B: NatMatrix) -> tuple[list[list[int]], list[list[int]]]:
    """Entry bounds any solution of A = RS, SR = B may be assumed to meet.

    ``R[i][j] <= max_l A[i][l]`` when S row j is forced nonzero (B row j
    nonzero) and ``R[i][j] <= max_l B[l][j]`` when S column i is forced
    nonzero (A column i nonzero).  If neither is forced, an entry above both
    maxima would multiply only zeros and can be replaced by 0.  S is bounded
    symmetrically.
    """
    a, b = A.data, B.data
    n, k = A.rows.size, B.rows.size
    a_zero_rows, a_zero_cols = set(A.zero_rows()), set(A.zero_cols())
    b_zero_rows, b_zero_cols = set(B.zero_rows()), set(B.zero_cols())
    bR = [[0] * k for _ in range(n)]
    bS = [[0] * n for _ in range(k)]
    for i in range(n):
        for j in range(k):
            via_a, via_b = _row_max(a, i), _col_max(b, j)
            forced = []
            if j not in b_zero_rows:
                forced.append(via_a)
            if i not in a_zero_cols:
                forced.append(via_b)
            bR[i][j] = min(forced) if forced else max(via_a, via_b)
    for j in range(k):
        for l in range(n):
            via_a, via_b = _col_max(a, l), _row_max(b, j)
            forced = []
            if j not in b_zero_cols:
                forced.append(via_a)
            if l not in a_zero_rows:
                forced.append(via_b)
            bS[j][l] = min(forced) if forced else max(via_a, via_b)
    return bR, bS


def _cap(bounds: list[list[int]], cap: int) -> tuple[list[list[int]], bool]:
    truncated = any(x > cap for r in bounds for x in r)
    return [[min(x, cap) for x in r] for r in bounds], truncated


def _rank_one_terms(target: Sequence[Sequence[int]], k: int, bR, bS, counter: _Counter,
                    B: Sequence[Sequence[int]] | None = None,
                    need_row: Sequence[bool] | None = None,
                    need_col: Sequence[bool] | None = None,
                    symmetric: bool = False) -> Iterator[tuple[list[list[int]], list[list[int]]]]:
    """Yield all (R, S) with RS = target as sums of k rank-one terms.

    Term j is (column j of R) x (row j of S).  With ``B`` the products
    ``(SR)[j1][j2]`` are checked as soon as both factors are known.  With
    ``symmetric`` the terms are required in non-decreasing order, which
    enumerates each factorization once up to a permutation of the inner index.
    """
    n_rows = len(target)
    n_cols = len(target[0]) if target else 0
    resid = [list(r) for r in target]
    cols: list[tuple[int, ...]] = []
    rows: list[tuple[int, ...]] = []

    def s_rows(col: tuple[int, ...], j: int) -> Iterator[tuple[int, ...]]:
        caps = []
        for l in range(n_cols):
            c = bS[j][l]
            for i in range(n_rows):
                if col[i]:
                    c = min(c, resid[i][l] // col[i])
            caps.append(c)
        return itertools.product(*(range(c + 1) for c in caps))

    def free_terms(j: int) -> Iterator[tuple[tuple[int, ...], tuple[int, ...]]]:
        for col in itertools.product(*(range(bR[i][j] + 1) for i in range(n_rows))):
            for row in s_rows(col, j):
                yield col, row

    def last_terms(j: int) -> Iterator[tuple[tuple[int, ...], tuple[int, ...]]]:
        # the final term must equal the residual, so it is read off directly
        pivot = next(((i, l) for i in range(n_rows) for l in range(n_cols) if resid[i][l]), None)
        if pivot is None:
            # col x row = 0: one of the two factors vanishes
            zero_col = (0,) * n_rows
            for row in itertools.product(*(range(bS[j][l] + 1) for l in range(n_cols))):
                yield zero_col, row
            zero_row = (0,) * n_cols
            for col in itertools.product(*(range(bR[i][j] + 1) for i in range(n_rows))):
                if any(col):
                    yield col, zero_row
            return
        i0, l0 = pivot
        column = [resid[i][l0] for i in range(n_rows)]
        for d in range(1, resid[i0][l0] + 1):
            if any(x % d for x in column):
                continue
            col = tuple(x // d for x in column)
            row = tuple(resid[i0][l] // col[i0] for l in range(n_cols))
            if any(col[i] > bR[i][j] for i in range(n_rows)) or any(row[l] > bS[j][l] for l in range(n_cols)):
                continue
            if all(resid[i][l] == col[i] * row[l] for i in range(n_rows) for l in range(n_cols)):
                yield col, row

    def rec(j: int) -> Iterator:
        if j == k:
            if not any(any(r) for r in resid):
                yield [list(r) for r in zip(*cols)] if cols else [[] for _ in range(n_rows)], \
                    [list(r) for r in rows]
            return
        last = j == k - 1
        for col, row in (last_terms(j) if last else free_terms(j)):
            if need_col is not None and need_col[j] and not any(col):
                continue
            counter.tick()
            if need_row is not None and need_row[j] and not any(row):
                continue
            if symmetric and cols and (col, row) < (cols[-1], rows[-1]):
                continue
            if B is not None:
                ok = sum(row[i] * col[i] for i in range(n_rows)) == B[j][j]
                if ok:
                    for j2 in range(j):
                        if (sum(row[i] * cols[j2][i] for i in range(n_rows)) != B[j][j2]
                                or sum(rows[j2][i] * col[i] for i in range(n_rows)) != B[j2][j]):
                            ok = False
                            break
                if not ok:
                    continue
            for i in range(n_rows):
                if col[i]:
                    ri = resid[i]
                    for l in range(n_cols):
                        ri[l] -= col[i] * row[l]
            if not (last and any(any(r) for r in resid)):
                cols.append(col)
                rows.append(row)
                yield from rec(j + 1)
                cols.pop()
                rows.pop()
            for i in range(n_rows):
                if col[i]:
                    ri = resid[i]
                    for l in range(n_cols):
                        ri[l] += col[i] * row[l]

    yield from rec(0)


def factor_elementary(A: NatMatrix, B: NatMatrix, caps: SearchCaps | None = None) -> SearchOutcome:
    """Search R (V x W), S (W x V) with A = RS and SR = B."""
    caps = caps or SearchCaps()
    if not A.is_square or not B.is_square:
        raise NotSquare("factor_elementary needs square matrices")
    n, k = A.rows.size, B.rows.size
    cert = rank_certificate(A, B, k, n)
    if cert:
        return SearchOutcome(Status.NONE, None, cert, 0)
    cert = trace_certificate(A, B)
    if cert:
        return SearchOutcome(Status.NONE, None, cert, 0)
    bR, bS = elementary_bounds(A, B)
    bR, cut_r = _cap(bR, caps.entry_cap)
    bS, cut_s = _cap(bS, caps.entry_cap)
    counter = _Counter(caps.node_budget)
    need_row = [any(B.data[j]) for j in range(k)]
    need_col = [any(B.data[i][j] for i in range(k)) for j in range(k)]
    try:
        for r, s in _rank_one_terms(A.data, k, bR, bS, counter, B=B.data,
                                    need_row=need_row, need_col=need_col):
            R = NatMatrix(A.rows, B.rows, tuple(map(tuple, r)))
            S = NatMatrix(B.rows, A.rows, tuple(map(tuple, s)))
            if same_entries(mat_mul(R, S), A) and same_entries(mat_mul(S, R), B):
                return SearchOutcome(Status.FOUND, (R, S), None, counter.n)
    except _BudgetExceeded:
        return SearchOutcome(Status.UNKNOWN, None,
                             {"kind": "budget", "node_budget": caps.node_budget}, counter.n)
    if cut_r or cut_s:
        return SearchOutcome(Status.UNKNOWN, None,
                             {"kind": "cap", "entry_cap": caps.entry_cap}, counter.n)
    return SearchOutcome(Status.NONE, None,
                         {"kind": "exhausted", "bounds_R": bR, "bounds_S": bS, "nodes": counter.n},
                         counter.n)


def iter_factorizations(X: NatMatrix, inner: IndexSet, entry_cap: int, counter: _Counter,
                        essential_only: bool = True) -> Iterator[tuple[NatMatrix, NatMatrix]]:
    """All X = RS with inner index set ``inner``, one per inner permutation class.

    With ``essential_only`` (the default) every inner index must be used by
    both factors, so SR has no zero rows or columns coming from unused terms.
    """
    n, d = X.rows.size, inner.size
    bR = [[min(_row_max(X.data, i), entry_cap)] * d for i in range(n)]
    bS = [[min(_col_max(X.data, l), entry_cap) for l in range(n)] for _ in range(d)]
    need = [essential_only] * d
    for r, s in _rank_one_terms(X.data, d, bR, bS, counter, need_row=need, need_col=need,
                                symmetric=True):
        yield (NatMatrix(X.rows, inner, tuple(map(tuple, r))),
               NatMatrix(inner, X.cols, tuple(map(tuple, s))))


# ---------------------------------------------------------------------------
# shift equivalence with a fixed lag


def se_bounds(A: NatMatrix, B: NatMatrix, m: int) -> tuple[list[list[int]], list[list[int]], bool]:
    """Entry bounds for R, S in A^m = RS, SR = B^m.

    Returns ``(bounds_R, bounds_S, complete)``; ``complete`` is False when
    some entry has no derived bound (its value is then limited only by the
    cap, so exhausting the search proves nothing).
    """
    Am, Bm = mat_pow(A, m).data, mat_pow(B, m).data
    n, k = A.rows.size, B.rows.size
    big = None
    complete = True
    bR = [[0] * k for _ in range(n)]
    bS = [[0] * n for _ in range(k)]
    for i in range(n):
        for j in range(k):
            forced = []
            if any(Bm[j]):
                forced.append(_row_max(Am, i))
            if any(r[i] for r in Am):
                forced.append(_col_max(Bm, j))
            if forced:
                bR[i][j] = min(forced)
            else:
                bR[i][j], complete = big, False
    for j in range(k):
        for l in range(n):
            forced = []
            if any(r[j] for r in Bm):
                forced.append(_col_max(Am, l))
            if any(Am[l]):
                forced.append(_row_max(Bm, j))
            if forced:
                bS[j][l] = min(forced)
            else:
                bS[j][l], complete = big, False
    return bR, bS, complete


def _intertwiners(A: NatMatrix, B: NatMatrix, bounds: list[list[int]], counter: _Counter
                  ) -> Iterator[tuple[tuple[int, ...], ...]]:
    """All R within ``bounds`` (row-major lexicographic order) with AR = RB."""
    n, k = A.rows.size, B.rows.size
    a, b = A.data, B.data
    nvars = n * k
    # equation (i, j): sum_t a[i][t] R[t][j] - sum_t R[i][t] b[t][j] = 0
    eqs = []
    for i in range(n):
        for j in range(k):
            coef: dict[int, int] = {}
            for t in range(n):
                if a[i][t]:
                    coef[t * k + j] = coef.get(t * k + j, 0) + a[i][t]
            for t in range(k):
                if b[t][j]:
                    coef[i * k + t] = coef.get(i * k + t, 0) - b[t][j]
            coef = {v: c for v, c in coef.items() if c}
            if coef:
                eqs.append(coef)
    by_var: list[list[int]] = [[] for _ in range(nvars)]
    for e, coef in enumerate(eqs):
        for v in coef:
            by_var[v].append(e)
    ub = [bounds[v // k][v % k] for v in range(nvars)]
    vals = [0] * nvars

    def feasible(e: int, upto: int) -> bool:
        lo = hi = 0
        for v, c in eqs[e].items():
            if v <= upto:
                lo += c * vals[v]
                hi += c * vals[v]
            elif c > 0:
                hi += c * ub[v]
            else:
                lo += c * ub[v]
        return lo <= 0 <= hi

    def rec(v: int) -> Iterator:
        if v == nvars:
            yield tuple(tuple(vals[i * k:(i + 1) * k]) for i in range(n))
            return
        for x in range(ub[v] + 1):
            counter.tick()
            vals[v] = x
            if all(feasible(e, v) for e in by_var[v]):
                yield from rec(v + 1)
        vals[v] = 0

    yield from rec(0)


def _column_solutions(R: Sequence[Sequence[int]], target: Sequence[int], bounds: Sequence[int],
                      counter: _Counter) -> list[tuple[int, ...]]:
    """Nonnegative s with R s = target, s[j] <= bounds[j]."""
    n, k = len(R), len(bounds)
    resid = list(target)
    s = [0] * k
    out: list[tuple[int, ...]] = []

    def rec(j: int) -> None:
        if j == k:
            if not any(resid):
                out.append(tuple(s))
            return
        cap = bounds[j]
        for i in range(n):
            if R[i][j]:
                cap = min(cap, resid[i] // R[i][j])
        for x in range(cap + 1):
            counter.tick()
            s[j] = x
            for i in range(n):
                resid[i] -= R[i][j] * x
            # rows with no remaining column to absorb the residual are dead
            if all(resid[i] == 0 or any(R[i][t] for t in range(j + 1, k)) for i in range(n)):
                rec(j + 1)
            for i in range(n):
                resid[i] += R[i][j] * x
        s[j] = 0

    rec(0)
    return out


def search_se(A: NatMatrix, B: NatMatrix, m: int, caps: SearchCaps | None = None) -> SearchOutcome:
    """Search R, S with AR = RB, BS = SA, A^m = RS and SR = B^m for one lag."""
    caps = caps or SearchCaps()
    if not A.is_square or not B.is_square:
        raise NotSquare("search_se needs square matrices")
    n, k = A.rows.size, B.rows.size
    Am, Bm = mat_pow(A, m), mat_pow(B, m)
    cert = rank_certificate(Am, Bm, k, n, lag=m)
    if cert:
        return SearchOutcome(Status.NONE, None, cert, 0)
    cert = trace_certificate(A, B)
    if cert:
        return SearchOutcome(Status.NONE, None, cert, 0)
    bR, bS, complete = se_bounds(A, B, m)
    cap = caps.entry_cap
    bR = [[cap if x is None else x for x in r] for r in bR]
    bS = [[cap if x is None else x for x in r] for r in bS]
    bR, cut_r = _cap(bR, cap)
    bS, cut_s = _cap(bS, cap)
    counter = _Counter(caps.node_budget)
    s_col_bounds = [[bS[j][l] for j in range(k)] for l in range(n)]
    try:
        for r in _intertwiners(A, B, bR, counter):
            cols = []
            for l in range(n):
                sols = _column_solutions(r, [Am.data[i][l] for i in range(n)], s_col_bounds[l], counter)
                if not sols:
                    break
                cols.append(sols)
            else:
                R = NatMatrix(A.rows, B.rows, r)
                for combo in itertools.product(*cols):
                    counter.tick()
                    S = NatMatrix(B.rows, A.rows, tuple(zip(*combo)))
                    if (same_entries(mat_mul(B, S), mat_mul(S, A))
                            and same_entries(mat_mul(S, R), Bm)
                            and same_entries(mat_mul(R, S), Am)
                            and same_entries(mat_mul(A, R), mat_mul(R, B))):
                        return SearchOutcome(Status.FOUND, (R, S), {"lag": m}, counter.n)
    except _BudgetExceeded:
        return SearchOutcome(Status.UNKNOWN, None,
                             {"kind": "budget", "lag": m, "node_budget": caps.node_budget}, counter.n)
    if cut_r or cut_s or not complete:
        return SearchOutcome(Status.UNKNOWN, None,
                             {"kind": "cap", "lag": m, "entry_cap": cap,
                              "derived_bounds_complete": complete}, counter.n)
    return SearchOutcome(Status.NONE, None,
                         {"kind": "exhausted", "lag": m, "bounds_R": bR, "bounds_S": bS,
                          "nodes": counter.n}, counter.n)


def search_se_upto(A: NatMatrix, B: NatMatrix, caps: SearchCaps | None = None) -> SearchOutcome:
    """Try every lag 1..caps.max_lag; NONE only if every lag is certified NONE."""
    caps = caps or SearchCaps()
    per_lag = []
    nodes = 0
    unknown = False
    for m in range(1, caps.max_lag + 1):
        out = search_se(A, B, m, caps)
        nodes += out.nodes
        if out.status is Status.FOUND:
            return SearchOutcome(Status.FOUND, out.witness, {"lag": m, "per_lag": per_lag}, nodes)
        unknown |= out.status is Status.UNKNOWN
        per_lag.append(dict(out.certificate or {}, status=out.status.value))
    status = Status.UNKNOWN if unknown else Status.NONE
    return SearchOutcome(status, None, {"kind": "per-lag", "max_lag": caps.max_lag,
                                        "per_lag": per_lag}, nodes)


# ---------------------------------------------------------------------------
# chains


def _conjugacy_key(X: NatMatrix) -> tuple:
    n = X.rows.size
    d = X.data
    return min(tuple(tuple(d[p[i]][p[j]] for j in range(n)) for i in range(n))
               for p in itertools.permutations(range(n)))


def search_sse_chain(A: NatMatrix, B: NatMatrix, caps: SearchCaps | None = None) -> SearchOutcome:
    """Breadth-first search for a shortest SSE chain within the caps.

    Intermediate matrices are kept only when essential (any chain between
    essential endpoints can be made so without changing its length) and are
    deduplicated up to simultaneous row/column permutation.
    """
    caps = caps or SearchCaps()
    if not A.is_square or not B.is_square:
        raise NotSquare("search_sse_chain needs square matrices")
    if A == B:
        return SearchOutcome(Status.FOUND, SSEChain(A, B, ()), {"lag": 0}, 0)
    cert = trace_certificate(A, B)
    if cert:
        return SearchOutcome(Status.NONE, None, cert, 0)
    counter = _Counter(caps.node_budget)
    lo, hi = caps.inner_dims
    frontier: list[tuple[NatMatrix, tuple]] = [(A, ())]
    seen = {(A.rows.size, _conjugacy_key(A))}
    unknown_steps = 0
    try:
        for depth in range(1, caps.max_lag + 1):
            for X, steps in frontier:
                out = factor_elementary(X, B, SearchCaps(caps.entry_cap, caps.inner_dims, caps.max_lag,
                                                         max(1, caps.node_budget - counter.n)))
                counter.tick(out.nodes)
                if out.status is Status.FOUND:
                    chain = SSEChain(A, B, steps + (out.witness,))
                    assert chain.verify()
                    return SearchOutcome(Status.FOUND, chain, {"lag": chain.lag}, counter.n)
                if out.status is Status.UNKNOWN:
                    unknown_steps += 1
            if depth == caps.max_lag:
                break
            nxt = []
            for X, steps in frontier:
                for d in range(lo, hi + 1):
                    inner = IndexSet(f"U{depth}", d)
                    for R, S in iter_factorizations(X, inner, caps.entry_cap, counter):
                        Y = mat_mul(S, R)
                        if not is_essential(Y):
                            continue
                        key = (d, _conjugacy_key(Y))
                        if key in seen:
                            continue
                        seen.add(key)
                        nxt.append((Y, steps + ((R, S),)))
            frontier = nxt
    except _BudgetExceeded:
        return SearchOutcome(Status.UNKNOWN, None,
                             {"kind": "budget", "node_budget": caps.node_budget}, counter.n)
    return SearchOutcome(Status.UNKNOWN, None,
                         {"kind": "cap", "max_lag": caps.max_lag, "inner_dims": list(caps.inner_dims),
                          "entry_cap": caps.entry_cap, "visited": len(seen),
                          "unknown_final_steps": unknown_steps}, counter.n)


# ---------------------------------------------------------------------------
# aligned concrete shifts


def _classes(paths) -> dict:
    out: dict = {}
    for p in paths:
        out.setdefault(endpoints(p), []).append(p)
    return out


def _class_permutations(dom_paths, cod_paths) -> Iterator[dict]:
    """Endpoint-preserving bijections, lexicographic matching first."""
    dom, cod = _classes(dom_paths), _classes(cod_paths)
    if set(dom) != set(cod) or any(len(dom[c]) != len(cod[c]) for c in dom):
        return
    keys = sorted(dom)
    for choice in itertools.product(*(itertools.permutations(cod[c]) for c in keys)):
        table = {}
        for c, images in zip(keys, choice):
            table.update(zip(dom[c], images))
        yield table


def _solve_phis(A, B, R, S, m, qA, qB, counter: _Counter):
    """Backtracking with propagation for φ_R, φ_S given ψ_A, ψ_B."""
    iA = {v: k for k, v in qA.items()}
    iB = {v: k for k, v in qB.items()}
    dom_R = path_space((A, R))
    dom_S = path_space((B, S))
    cod_R = _classes(path_space((R, B)))
    cod_S = _classes(path_space((S, A)))
    s_from: dict[int, list] = {}
    for s in path_space((S,)):
        s_from.setdefault(s[0].v, []).append(s[0])
    r_from: dict[int, list] = {}
    for r in path_space((R,)):
        r_from.setdefault(r[0].v, []).append(r[0])
    fR: dict = {}
    fS: dict = {}
    usedR: set = set()
    usedS: set = set()

    def assign(trail, queue, which, key, val) -> bool:
        f, used = (fR, usedR) if which == "R" else (fS, usedS)
        cur = f.get(key)
        if cur is not None:
            return cur == val
        if val in used:
            return False
        f[key] = val
        used.add(val)
        trail.append((which, key, val))
        queue.append((which, key))
        return True

    def propagate(trail, queue) -> bool:
        while queue:
            counter.tick()
            which, key = queue.pop()
            if which == "R":
                a, r = key
                r1, b = fR[key]
                for s in s_from.get(r.w, ()):
                    t = (a,) + qA[(r, s)]
                    r2, s1 = iA[t[:m]]
                    if r2 != r1 or not assign(trail, queue, "S", (b, s), (s1, t[m])):
                        return False
            else:
                b, s = key
                s1, a = fS[key]
                for r in r_from.get(s.w, ()):
                    t = (b,) + qB[(s, r)]
                    s2, r1 = iB[t[:m]]
                    if s2 != s1 or not assign(trail, queue, "R", (a, r), (r1, t[m])):
                        return False
        return True

    def undo(trail, mark) -> None:
        while len(trail) > mark:
            which, key, val = trail.pop()
            f, used = (fR, usedR) if which == "R" else (fS, usedS)
            del f[key]
            used.discard(val)

    trail: list = []

    def rec() -> bool:
        key = next((p for p in dom_R if p not in fR), None)
        which, cod = "R", cod_R
        if key is None:
            key = next((p for p in dom_S if p not in fS), None)
            which, cod = "S", cod_S
            if key is None:
                return True
        used = usedR if which == "R" else usedS
        for val in cod.get((key[0].v, key[1].w), ()):
            if val in used:
                continue
            mark = len(trail)
            queue: list = []
            if assign(trail, queue, which, key, val) and propagate(trail, queue):
                if rec():
                    return True
            undo(trail, mark)
        return False

    if rec():
        return dict(fR), dict(fS)
    return None


def search_aligned(A: NatMatrix, B: NatMatrix, m: int, R: NatMatrix, S: NatMatrix,
                   caps: SearchCaps | None = None) -> SearchOutcome:
    """Search the four path isomorphisms of an aligned concrete shift on given R, S."""
    caps = caps or SearchCaps()
    try:
        ok = (same_entries(mat_mul(A, R), mat_mul(R, B)) and same_entries(mat_mul(B, S), mat_mul(S, A))
              and same_entries(mat_mul(R, S), mat_pow(A, m)) and same_entries(mat_mul(S, R), mat_pow(B, m)))
    except Exception as exc:
        raise NotAnSEWitness(str(exc)) from exc
    if not ok:
        raise NotAnSEWitness(f"R, S do not satisfy the lag-{m} equations")
    counter = _Counter(caps.node_budget)
    pairs = 0
    try:
        for qA in _class_permutations(path_space((R, S)), path_space((A,) * m)):
            for qB in _class_permutations(path_space((S, R)), path_space((B,) * m)):
                pairs += 1
                counter.tick()
                sol = _solve_phis(A, B, R, S, m, qA, qB, counter)
                if sol is None:
                    continue
                fR, fS = sol
                cs = ConcreteShift(A, B, R, S, m,
                                   PathIso((A, R), (R, B), fR), PathIso((B, S), (S, A), fS),
                                   PathIso((R, S), (A,) * m, qA), PathIso((S, R), (B,) * m, qB))
                assert validate_concrete_shift(cs).ok
                flags = classify(cs)
                assert flags.aligned
                return SearchOutcome(Status.FOUND, cs, {"psi_pairs_tried": pairs}, counter.n)
    except _BudgetExceeded:
        return SearchOutcome(Status.UNKNOWN, None,
                             {"kind": "budget", "node_budget": caps.node_budget}, counter.n)
    return SearchOutcome(Status.NONE, None, {"kind": "exhausted", "psi_pairs": pairs}, counter.n)


def identity_se_witness(A: NatMatrix) -> tuple[NatMatrix, NatMatrix]:
    """R = I, S = A: the lag-1 shift equivalence of A with itself."""
    return identity(A.rows), A
