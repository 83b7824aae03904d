"""Correspondences over direct sums of compacts, described by multiplicity matrices."""

from __future__ import annotations

from dataclasses import dataclass

from .errors import IncompatibleIndexSets
from .matrices import OMEGA, CardMatrix, _Matrix, card_mul


def _check_dims(dims, size: int, label: str) -> tuple:
    dims = tuple(dims)
    if len(dims) != size:
        raise IncompatibleIndexSets(f"{label} has {len(dims)} entries for {size} indices")
    for d in dims:
        if d is not OMEGA and not (isinstance(d, int) and not isinstance(d, bool) and d >= 1):
            raise ValueError(f"{label} entries must be positive integers or ω, got {d!r}")
    return dims


@dataclass(frozen=True)
class CorrDescriptor:
    """Dimension vectors of both coefficient algebras and the multiplicity matrix."""

    left_dims: tuple
    right_dims: tuple
    mult: CardMatrix

    def __post_init__(self) -> None:
        if not isinstance(self.mult, CardMatrix):
            object.__setattr__(self, "mult", CardMatrix.from_matrix(self.mult))
        object.__setattr__(self, "left_dims",
                           _check_dims(self.left_dims, self.mult.rows.size, "left_dims"))
        object.__setattr__(self, "right_dims",
                           _check_dims(self.right_dims, self.mult.cols.size, "right_dims"))


@dataclass(frozen=True)
class Predicates:
    injective: bool
    proper: bool
    full: bool
    regular: bool
    essential: bool


def descriptor_from_matrix(A: _Matrix) -> CorrDescriptor:
    """Graph correspondence of A: every fiber one-dimensional."""
    return CorrDescriptor((1,) * A.rows.size, (1,) * A.cols.size, CardMatrix.from_matrix(A))


def tensor_descriptor(X: CorrDescriptor, Y: CorrDescriptor) -> CorrDescriptor:
    """Balanced tensor product; multiplicities compose by cardinal matrix product."""
    if X.mult.cols != Y.mult.rows or X.right_dims != Y.left_dims:
        raise IncompatibleIndexSets("middle coefficient algebras differ")
    return CorrDescriptor(X.left_dims, Y.right_dims, card_mul(X.mult, Y.mult))


def _same_algebras(X: CorrDescriptor, Y: CorrDescriptor) -> None:
    if (X.mult.rows != Y.mult.rows or X.mult.cols != Y.mult.cols
            or X.left_dims != Y.left_dims or X.right_dims != Y.right_dims):
        raise IncompatibleIndexSets("descriptors live over different coefficient algebras")


def descriptors_isomorphic(X: CorrDescriptor, Y: CorrDescriptor) -> bool:
    _same_algebras(X, Y)
    return X.mult.data == Y.mult.data


def descriptor_predicates(X: CorrDescriptor) -> Predicates:
    M = X.mult
    injective = not M.zero_rows()
    full = not M.zero_cols()
    proper = M.is_finite()
    return Predicates(injective=injective, proper=proper, full=full,
                      regular=injective and proper, essential=injective and full)
