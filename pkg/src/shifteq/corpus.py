"""Bundled example matrices and the A_k/B_k family."""

from __future__ import annotations

from importlib import resources

from .matrices import IndexSet, NatMatrix

BUNDLED = ("ex58_A", "ex58_B", "ex58_C", "sink_chain")


def bundled_text(name: str) -> str:
    if name not in BUNDLED:
        raise KeyError(f"no bundled example {name!r}")
    return resources.files("shifteq").joinpath("data", f"{name}.json").read_text(encoding="utf-8")


def bundled(name: str) -> NatMatrix:
    from .artifacts import loads
    return loads(bundled_text(name)).payload


def ex58() -> tuple[NatMatrix, NatMatrix, NatMatrix]:
    """A ~ B and B ~ C elementarily, but A and C are not elementarily related."""
    return bundled("ex58_A"), bundled("ex58_B"), bundled("ex58_C")


def sink_chain() -> NatMatrix:
    return bundled("sink_chain")


def a_k(k: int) -> NatMatrix:
    _check_k(k)
    return NatMatrix(IndexSet("V", 2), IndexSet("V", 2), ((1, k), (k - 1, 1)))


def b_k(k: int) -> NatMatrix:
    _check_k(k)
    return NatMatrix(IndexSet("W", 2), IndexSet("W", 2), ((1, k * (k - 1)), (1, 1)))


def _check_k(k: int) -> None:
    if not isinstance(k, int) or isinstance(k, bool) or k < 1:
        raise ValueError(f"k must be a positive integer, got {k!r}")
