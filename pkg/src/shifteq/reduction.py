"""Ideal calculus on vertex subsets, quotients and corners of elementary pairs,
chain essentialization and finite trimming of chains with infinite entries.

For coefficient algebras that are direct sums of compacts every ideal is
supported on a vertex subset, so ideals are plain index subsets here and
quotients and corners are submatrices.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Sequence

from .errors import IncompatibleIndexSets, NotSquare, TrimFailure, VerificationFailure
from .matrices import OMEGA, CardMatrix, IndexSet, NatMatrix, _Matrix, is_essential, product, same_entries
from .search import SSEChain


@dataclass(frozen=True)
class IdealSubset:
    over: IndexSet
    members: frozenset = frozenset()

    def __post_init__(self) -> None:
        members = frozenset(self.members)
        object.__setattr__(self, "members", members)
        bad = [x for x in members if not (isinstance(x, int) and 0 <= x < self.over.size)]
        if bad:
            raise ValueError(f"indices {sorted(bad)} outside {self.over.name}")

    def complement(self) -> tuple[int, ...]:
        return tuple(i for i in range(self.over.size) if i not in self.members)

    def sorted(self) -> tuple[int, ...]:
        return tuple(sorted(self.members))

    def __and__(self, other: "IdealSubset") -> "IdealSubset":
        _same_over(self, other)
        return IdealSubset(self.over, self.members & other.members)

    def __or__(self, other: "IdealSubset") -> "IdealSubset":
        _same_over(self, other)
        return IdealSubset(self.over, self.members | other.members)

    def __le__(self, other: "IdealSubset") -> bool:
        _same_over(self, other)
        return self.members <= other.members

    def __len__(self) -> int:
        return len(self.members)

    @classmethod
    def full(cls, over: IndexSet) -> "IdealSubset":
        return cls(over, frozenset(range(over.size)))


def _same_over(a: IdealSubset, b: IdealSubset) -> None:
    if a.over != b.over:
        raise IncompatibleIndexSets(f"ideals over {a.over.name} and {b.over.name}")


def preimage_ideal(R: _Matrix, I: IdealSubset) -> IdealSubset:
    """``{v : R[v][w] == 0 for every w outside I}``."""
    if I.over != R.cols:
        raise IncompatibleIndexSets(f"ideal over {I.over.name}, matrix columns {R.cols.name}")
    outside = I.complement()
    return IdealSubset(R.rows, frozenset(v for v, row in enumerate(R.data)
                                         if not any(row[w] for w in outside)))


def fully_invariant_trace(A: _Matrix) -> list[IdealSubset]:
    """The iterates ``∅, A^{-1}(∅), A^{-1}(A^{-1}(∅)), ...`` up to the fixed point."""
    if not A.is_square:
        raise NotSquare(f"{A.rows.name}x{A.cols.name} is not square")
    cur = IdealSubset(A.rows)
    out = [cur]
    while True:
        nxt = preimage_ideal(A, cur)
        if nxt == cur:
            return out
        out.append(nxt)
        cur = nxt


def min_fully_invariant(A: _Matrix) -> IdealSubset:
    """Least fixed point of ``S ↦ preimage_ideal(A, S)`` above ∅."""
    return fully_invariant_trace(A)[-1]


def proper_support(A: _Matrix) -> IdealSubset:
    """Rows all of whose entries are finite."""
    if not A.is_square:
        raise NotSquare(f"{A.rows.name}x{A.cols.name} is not square")
    return IdealSubset(A.rows, frozenset(v for v, row in enumerate(A.data)
                                         if not any(x is OMEGA for x in row)))


def column_support(A: _Matrix) -> IdealSubset:
    """Indices of nonzero columns."""
    zero = set(A.zero_cols())
    return IdealSubset(A.cols, frozenset(j for j in range(A.cols.size) if j not in zero))


@dataclass(frozen=True)
class PairReduction:
    A: _Matrix
    B: _Matrix
    R: _Matrix
    S: _Matrix
    removed_A: tuple[int, ...] = ()
    removed_B: tuple[int, ...] = ()

    def unchanged(self) -> bool:
        return not self.removed_A and not self.removed_B

    def as_tuple(self) -> tuple:
        return (self.A, self.B, self.R, self.S)


def _check_pair(A, B, R, S) -> None:
    if not (same_entries(product([R, S]), A) and same_entries(product([S, R]), B)):
        raise VerificationFailure("input pair does not satisfy A = RS, SR = B")


def _restrict_pair(A, B, R, S, keep_V: Sequence[int], keep_W: Sequence[int]) -> PairReduction:
    V2, W2 = A.rows.restrict(keep_V), B.rows.restrict(keep_W)
    A2 = A.submatrix(keep_V, keep_V, V2, V2)
    B2 = B.submatrix(keep_W, keep_W, W2, W2)
    R2 = R.submatrix(keep_V, keep_W, V2, W2)
    S2 = S.submatrix(keep_W, keep_V, W2, V2)
    removed_V = tuple(i for i in range(A.rows.size) if i not in set(keep_V))
    removed_W = tuple(i for i in range(B.rows.size) if i not in set(keep_W))
    return PairReduction(A2, B2, R2, S2, removed_V, removed_W)


def _verify(red: PairReduction, what: str) -> None:
    if not same_entries(product([red.R, red.S]), red.A):
        raise VerificationFailure(f"{what}: A' != R'S'")
    if not same_entries(product([red.S, red.R]), red.B):
        raise VerificationFailure(f"{what}: S'R' != B'")


def quotient_pair(A, B, R, S) -> PairReduction:
    """Delete the smallest fully invariant ideals of A and B."""
    _check_pair(A, B, R, S)
    IA, IB = min_fully_invariant(A), min_fully_invariant(B)
    red = _restrict_pair(A, B, R, S, IA.complement(), IB.complement())
    _verify(red, "quotient")
    if red.A.zero_rows() or red.B.zero_rows():
        raise VerificationFailure("quotient left a zero row")
    return red


def full_corner_pair(A, B, R, S) -> PairReduction:
    """Restrict to the nonzero-column supports of A and B.

    The corner can itself have zero columns (a column supported only on
    removed rows); :func:`essentialize_chain` repeats rounds until none remain.
    """
    _check_pair(A, B, R, S)
    I, J = column_support(A), column_support(B)
    red = _restrict_pair(A, B, R, S, I.sorted(), J.sorted())
    _verify(red, "corner")
    return red


def proper_corner_pair(A, B, R, S) -> PairReduction:
    """Restrict to the rows of A and B with only finite entries."""
    _check_pair(A, B, R, S)
    I, J = proper_support(A), proper_support(B)
    red = _restrict_pair(A, B, R, S, I.sorted(), J.sorted())
    _verify(red, "proper corner")
    return red


def kernel_quotient_rounds(A: _Matrix) -> list[_Matrix]:
    """Repeatedly delete zero rows together with their columns.

    Returns ``[A, A_1, ..., A_r]``; ``r`` is the number of rounds until no
    zero row is left.  The indices removed overall are exactly
    ``min_fully_invariant(A)``.
    """
    if not A.is_square:
        raise NotSquare(f"{A.rows.name}x{A.cols.name} is not square")
    out = [A]
    cur = A
    while cur.zero_rows():
        zero = set(cur.zero_rows())
        keep = [i for i in range(cur.rows.size) if i not in zero]
        U = cur.rows.restrict(keep)
        cur = cur.submatrix(keep, keep, U, U)
        out.append(cur)
    return out


# ---------------------------------------------------------------------------
# chains


@dataclass
class ChainReport:
    actions: list = field(default_factory=list)

    def add(self, phase: str, step: int, red: PairReduction) -> None:
        if not red.unchanged():
            self.actions.append({"phase": phase, "step": step,
                                 "removed_left": list(red.removed_A),
                                 "removed_right": list(red.removed_B)})


def _apply_per_step(chain: SSEChain, fn, phase: str, report: ChainReport) -> SSEChain:
    levels = chain.levels()
    steps = []
    for i, (R, S) in enumerate(chain.steps):
        red = fn(levels[i], levels[i + 1], R, S)
        report.add(phase, i + 1, red)
        steps.append((red.R, red.S))
    out = SSEChain(chain.A, chain.B, tuple(steps))
    if not out.verify():
        raise VerificationFailure(f"{phase}: {out.failures()}")
    return out


def essentialize_chain(chain: SSEChain, max_rounds: int = 8) -> tuple[SSEChain, ChainReport]:
    """Make every intermediate matrix essential without changing endpoints or lag.

    Per round: quotient by the smallest fully invariant ideals, restrict to
    finite rows when infinite entries are present, take full corners, then
    quotient again.
    """
    if not chain.verify():
        raise VerificationFailure(f"input chain: {chain.failures()}")
    if not (is_essential(chain.A) and is_essential(chain.B)):
        raise VerificationFailure("chain endpoints must be essential")
    report = ChainReport()
    cur = chain
    for _ in range(max_rounds):
        if all(is_essential(X) for X in cur.levels()):
            break
        cur = _apply_per_step(cur, quotient_pair, "quotient", report)
        if any(isinstance(M, CardMatrix) for st in cur.steps for M in st):
            cur = _apply_per_step(cur, proper_corner_pair, "proper", report)
        cur = _apply_per_step(cur, full_corner_pair, "corner", report)
        cur = _apply_per_step(cur, quotient_pair, "quotient", report)
    else:
        raise VerificationFailure("essentialization did not converge")
    if not all(is_essential(X) for X in cur.levels()):
        raise VerificationFailure("essentialization did not converge")
    if not (same_entries(cur.A, chain.A) and same_entries(cur.B, chain.B)):
        raise VerificationFailure("endpoints changed")
    return cur, report


# ---------------------------------------------------------------------------
# trimming


def _pos(x) -> bool:
    return x is OMEGA or x > 0


def forward_pass(chain: SSEChain) -> list[frozenset]:
    """``U'_0 = V``; ``U'_i`` holds the indices with a positive term
    ``R_i[u][k] S_i[k][u']`` for ``u, u'`` in ``U'_{i-1}``."""
    sets = [frozenset(range(chain.A.rows.size))]
    for R, S in chain.steps:
        prev = sets[-1]
        sets.append(frozenset(
            k for k in range(R.cols.size)
            if any(_pos(R.data[u][k]) for u in prev) and any(_pos(S.data[k][u]) for u in prev)))
    return sets


def backward_pass(chain: SSEChain) -> list[frozenset]:
    """Mirror of :func:`forward_pass` starting from the right endpoint."""
    sets = [frozenset(range(chain.B.rows.size))]
    for R, S in reversed(chain.steps):
        prev = sets[-1]
        sets.append(frozenset(
            k for k in range(R.rows.size)
            if any(_pos(S.data[w][k]) for w in prev) and any(_pos(R.data[k][w]) for w in prev)))
    sets.reverse()
    return sets


def _close(chain: SSEChain, keep: list[set]) -> None:
    """Add every index carrying a positive term between retained indices."""
    steps = chain.steps
    m = len(steps)
    changed = True
    while changed:
        changed = False
        for i in range(m + 1):
            # entries of X_i realized through level i-1 (S_i R_i) and level i+1 (R_{i+1} S_{i+1})
            if i >= 1:
                R, S = steps[i - 1]
                for k in range(R.rows.size):
                    if k not in keep[i - 1] and any(_pos(S.data[u][k]) for u in keep[i]) \
                            and any(_pos(R.data[k][u]) for u in keep[i]):
                        keep[i - 1].add(k)
                        changed = True
            if i < m:
                R, S = steps[i]
                for k in range(R.cols.size):
                    if k not in keep[i + 1] and any(_pos(R.data[u][k]) for u in keep[i]) \
                            and any(_pos(S.data[k][u]) for u in keep[i]):
                        keep[i + 1].add(k)
                        changed = True


@dataclass
class TrimReport:
    forward: list
    backward: list
    kept: list
    zeroed: int

    def forward_cuts_right_end(self) -> bool:
        return len(self.forward[-1]) < len(self.backward[-1])


def _finite(M: _Matrix) -> tuple[NatMatrix, int]:
    zeroed = sum(1 for r in M.data for x in r if x is OMEGA)
    data = tuple(tuple(0 if x is OMEGA else x for x in r) for r in M.data)
    return NatMatrix(M.rows, M.cols, data), zeroed


def trim_chain(doc: SSEChain) -> tuple[SSEChain, TrimReport]:
    """Cut a chain down to finitely supported, all-finite intermediates.

    Kept index sets are the union of a forward pass from the left endpoint
    and a backward pass from the right one, closed under positive terms;
    surviving infinite entries are set to 0 and the result is re-verified.
    Indices keep their original order, so the output is canonical.
    """
    A, B = doc.A, doc.B
    for X in (A, B):
        if isinstance(X, CardMatrix) and not X.is_finite():
            raise TrimFailure("chain endpoints must be finite")
    if not doc.verify():
        raise TrimFailure(f"input chain does not verify: {doc.failures()}")
    m = doc.lag
    fwd, bwd = forward_pass(doc), backward_pass(doc)
    keep = [set(f | b) for f, b in zip(fwd, bwd)]
    keep[0] = set(range(A.rows.size))
    keep[m] = set(range(B.rows.size))
    _close(doc, keep)
    if len(keep[0]) != A.rows.size or len(keep[m]) != B.rows.size:
        raise TrimFailure("closure reached outside the endpoints")
    order = [tuple(sorted(k)) for k in keep]
    sets = []
    for i, idx in enumerate(order):
        if i == 0:
            sets.append(A.rows)
        elif i == m:
            sets.append(B.rows)
        else:
            sets.append(doc.steps[i - 1][0].cols.restrict(idx))
    steps = []
    zeroed = 0
    for i, (R, S) in enumerate(doc.steps):
        R2, zr = _finite(R.submatrix(order[i], order[i + 1], sets[i], sets[i + 1]))
        S2, zs = _finite(S.submatrix(order[i + 1], order[i], sets[i + 1], sets[i]))
        zeroed += zr + zs
        steps.append((R2, S2))
    A2 = A if isinstance(A, NatMatrix) else A.to_nat()
    B2 = B if isinstance(B, NatMatrix) else B.to_nat()
    out = SSEChain(A2, B2, tuple(steps))
    if not out.verify():
        raise TrimFailure(f"trimmed chain does not verify: {out.failures()}")
    return out, TrimReport([sorted(s) for s in fwd], [sorted(s) for s in bwd],
                           [list(o) for o in order], zeroed)
