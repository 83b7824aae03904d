"""Exact matrices over the naturals and over the naturals with an infinite symbol.

Rows and columns carry named :class:`IndexSet` labels so that composition is
checked by identity of the index sets and not merely by size.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Sequence, Union

from .errors import IncompatibleIndexSets, NotSquare


class _Omega:
    """The infinite entry. A singleton, printed as ``ω``."""

    _instance: "_Omega | None" = None

    def __new__(cls) -> "_Omega":
        if cls._instance is None:
            cls._instance = super().__new__(cls)
        return cls._instance

    def __repr__(self) -> str:
        return "ω"

    def __reduce__(self):
        return (_Omega, ())


OMEGA = _Omega()

Card = Union[int, _Omega]


def card_times(x: Card, y: Card) -> Card:
    if x == 0 or y == 0:
        return 0
    if x is OMEGA or y is OMEGA:
        return OMEGA
    return x * y


def card_plus(x: Card, y: Card) -> Card:
    if x is OMEGA or y is OMEGA:
        return OMEGA
    return x + y


@dataclass(frozen=True)
class IndexSet:
    name: str
    size: int

    def __post_init__(self) -> None:
        if not isinstance(self.size, int) or isinstance(self.size, bool) or self.size < 0:
            raise ValueError(f"index set size must be a nonnegative integer, got {self.size!r}")
        if not isinstance(self.name, str) or not self.name:
            raise ValueError("index set name must be a nonempty string")

    def __iter__(self):
        return iter(range(self.size))

    def __len__(self) -> int:
        return self.size

    def restrict(self, keep: Sequence[int]) -> "IndexSet":
        """Sub-index-set on ``keep`` (sorted). The name is derived deterministically."""
        keep = tuple(keep)
        if keep == tuple(range(self.size)):
            return self
        return IndexSet(f"{self.name}[{','.join(map(str, keep))}]", len(keep))


def _as_index_set(x: "IndexSet | str", size: int) -> IndexSet:
    if isinstance(x, IndexSet):
        if x.size != size:
            raise IncompatibleIndexSets(f"index set {x.name} has size {x.size}, data has {size}")
        return x
    return IndexSet(x, size)


@dataclass(frozen=True, eq=False)
class _Matrix:
    rows: IndexSet
    cols: IndexSet
    data: tuple[tuple, ...]

    def __post_init__(self) -> None:
        data = tuple(tuple(r) for r in self.data)
        object.__setattr__(self, "data", data)
        if len(data) != self.rows.size:
            raise IncompatibleIndexSets(
                f"{len(data)} rows given for index set {self.rows.name} of size {self.rows.size}")
        for r in data:
            if len(r) != self.cols.size:
                raise IncompatibleIndexSets(
                    f"row of length {len(r)} for index set {self.cols.name} of size {self.cols.size}")
            for x in r:
                self._check_entry(x)

    @staticmethod
    def _check_entry(x) -> None:
        raise NotImplementedError

    @classmethod
    def from_rows(cls, data: Sequence[Sequence], rows: "IndexSet | str" = "V",
                  cols: "IndexSet | str | None" = None):
        """Build from nested lists. ``cols`` defaults to ``rows`` for square data."""
        data = [list(r) for r in data]
        n = len(data)
        k = len(data[0]) if data else 0
        row_set = _as_index_set(rows, n)
        if cols is None:
            cols = row_set if n == k else ("W" if row_set.name != "W" else "V")
        return cls(row_set, _as_index_set(cols, k), tuple(tuple(r) for r in data))

    @property
    def shape(self) -> tuple[int, int]:
        return (self.rows.size, self.cols.size)

    @property
    def is_square(self) -> bool:
        return self.rows == self.cols

    def __getitem__(self, ij: tuple[int, int]):
        i, j = ij
        return self.data[i][j]

    def row(self, i: int) -> tuple:
        return self.data[i]

    def col(self, j: int) -> tuple:
        return tuple(r[j] for r in self.data)

    def tolist(self) -> list[list]:
        return [list(r) for r in self.data]

    def zero_rows(self) -> tuple[int, ...]:
        return tuple(i for i, r in enumerate(self.data) if not any(r))

    def zero_cols(self) -> tuple[int, ...]:
        return tuple(j for j in range(self.cols.size)
                     if not any(r[j] for r in self.data))

    def transpose(self):
        return type(self)(self.cols, self.rows, tuple(zip(*self.data)) if self.data else
                          tuple(() for _ in range(self.cols.size)))

    def submatrix(self, keep_rows: Sequence[int], keep_cols: Sequence[int],
                  row_set: IndexSet | None = None, col_set: IndexSet | None = None):
        keep_rows, keep_cols = tuple(keep_rows), tuple(keep_cols)
        row_set = row_set or self.rows.restrict(keep_rows)
        col_set = col_set or self.cols.restrict(keep_cols)
        return type(self)(row_set, col_set,
                          tuple(tuple(self.data[i][j] for j in keep_cols) for i in keep_rows))

    def relabel(self, rows: IndexSet | None = None, cols: IndexSet | None = None):
        return type(self)(rows or self.rows, cols or self.cols, self.data)

    def __eq__(self, other) -> bool:
        if not isinstance(other, _Matrix):
            return NotImplemented
        return (self.rows, self.cols, self.data) == (other.rows, other.cols, other.data)

    def __hash__(self) -> int:
        return hash((self.rows, self.cols, self.data))

    def __repr__(self) -> str:
        body = "[" + ", ".join("[" + ", ".join(map(repr, r)) + "]" for r in self.data) + "]"
        return f"{type(self).__name__}({body}, {self.rows.name}x{self.cols.name})"


class NatMatrix(_Matrix):
    """Matrix with entries in ℕ."""

    @staticmethod
    def _check_entry(x) -> None:
        if not isinstance(x, int) or isinstance(x, bool) or x < 0:
            raise ValueError(f"entries must be nonnegative integers, got {x!r}")

    def total(self) -> int:
        return sum(map(sum, self.data))

    def max_entry(self) -> int:
        return max((max(r) for r in self.data if r), default=0)


class CardMatrix(_Matrix):
    """Matrix with entries in ℕ ∪ {ω}."""

    @staticmethod
    def _check_entry(x) -> None:
        if x is OMEGA:
            return
        NatMatrix._check_entry(x)

    def is_finite(self) -> bool:
        return not any(x is OMEGA for r in self.data for x in r)

    def to_nat(self) -> NatMatrix:
        if not self.is_finite():
            raise ValueError("matrix has infinite entries")
        return NatMatrix(self.rows, self.cols, self.data)

    @classmethod
    def from_matrix(cls, M: _Matrix) -> "CardMatrix":
        return cls(M.rows, M.cols, M.data)


AnyMatrix = Union[NatMatrix, CardMatrix]


def as_lag(m: int) -> int:
    if not isinstance(m, int) or isinstance(m, bool) or m < 1:
        raise ValueError(f"lag must be a positive integer, got {m!r}")
    return m


def identity(index_set: IndexSet) -> NatMatrix:
    n = index_set.size
    return NatMatrix(index_set, index_set,
                     tuple(tuple(int(i == j) for j in range(n)) for i in range(n)))


def zeros(rows: IndexSet, cols: IndexSet) -> NatMatrix:
    return NatMatrix(rows, cols, tuple((0,) * cols.size for _ in range(rows.size)))


def _check_composable(A: _Matrix, B: _Matrix) -> None:
    if A.cols != B.rows:
        raise IncompatibleIndexSets(
            f"cannot compose {A.rows.name}x{A.cols.name} with {B.rows.name}x{B.cols.name}")


def mat_mul(A: NatMatrix, B: NatMatrix) -> NatMatrix:
    _check_composable(A, B)
    cols = list(zip(*B.data)) if B.data else [() for _ in range(B.cols.size)]
    return NatMatrix(A.rows, B.cols, tuple(
        tuple(sum(x * y for x, y in zip(r, c)) for c in cols) for r in A.data))


def mat_pow(A: NatMatrix, m: int) -> NatMatrix:
    if not A.is_square:
        raise NotSquare(f"{A.rows.name}x{A.cols.name} is not square")
    m = as_lag(m)
    P = A
    for _ in range(m - 1):
        P = mat_mul(P, A)
    return P


def card_mul(C: _Matrix, D: _Matrix) -> CardMatrix:
    _check_composable(C, D)
    out = []
    for r in C.data:
        row = []
        for j in range(D.cols.size):
            acc: Card = 0
            for k, x in enumerate(r):
                acc = card_plus(acc, card_times(x, D.data[k][j]))
            row.append(acc)
        out.append(tuple(row))
    return CardMatrix(C.rows, D.cols, tuple(out))


def product(factors: Iterable[_Matrix]) -> _Matrix:
    """Left-to-right product; cardinal arithmetic if any factor is a CardMatrix."""
    factors = list(factors)
    P = factors[0]
    for F in factors[1:]:
        if isinstance(P, CardMatrix) or isinstance(F, CardMatrix):
            P = card_mul(P, F)
        else:
            P = mat_mul(P, F)
    return P


def same_entries(X: _Matrix, Y: _Matrix) -> bool:
    """Equal index sets and entries, regardless of matrix class."""
    return X.rows == Y.rows and X.cols == Y.cols and X.data == Y.data


def is_essential(A: _Matrix) -> bool:
    return not A.zero_rows() and not A.zero_cols()


def rank_rational(A: NatMatrix) -> int:
    """Rank over ℚ by fraction-exact Gaussian elimination."""
    M = [[Fraction(x) for x in r] for r in A.data]
    rank = 0
    n_cols = A.cols.size
    for c in range(n_cols):
        pivot = next((i for i in range(rank, len(M)) if M[i][c] != 0), None)
        if pivot is None:
            continue
        M[rank], M[pivot] = M[pivot], M[rank]
        p = M[rank][c]
        for i in range(rank + 1, len(M)):
            if M[i][c] != 0:
                f = M[i][c] / p
                M[i] = [x - f * y for x, y in zip(M[i], M[rank])]
        rank += 1
    return rank


def trace(A: NatMatrix) -> int:
    if not A.is_square:
        raise NotSquare(f"{A.rows.name}x{A.cols.name} is not square")
    return sum(A.data[i][i] for i in range(A.rows.size))
