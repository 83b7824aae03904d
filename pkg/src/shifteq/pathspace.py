"""Edge sets, fibered path spaces and path isomorphisms.

A path over a family ``(F_1, ..., F_m)`` is a flat tuple of :class:`Edge`
values ``(e_1, ..., e_m)`` with ``e_i`` in ``E_{F_i}`` and
``r(e_i) == s(e_{i+1})``.  Powers are never materialized: ``E_A^j`` is the
path space of the family ``(A,) * j``.  :func:`flatten` converts to the
single-matrix form ``E_{A^j}`` when a file or caller wants it.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache
from types import MappingProxyType
from typing import Iterable, Mapping, NamedTuple, Sequence

from .errors import IncompatibleIndexSets
from .matrices import NatMatrix, mat_pow


class Edge(NamedTuple):
    v: int
    alpha: int
    w: int


Path = tuple  # tuple[Edge, ...]
PathFamily = tuple  # tuple[NatMatrix, ...]


def edge_key(e: Edge) -> tuple[int, int, int]:
    return (e.v, e.w, e.alpha)


def path_key(p: Path) -> tuple:
    return tuple((e.v, e.w, e.alpha) for e in p)


def source(p: Path) -> int:
    return p[0].v


def range_(p: Path) -> int:
    return p[-1].w


def endpoints(p: Path) -> tuple[int, int]:
    return (p[0].v, p[-1].w)


@lru_cache(maxsize=4096)
def edge_set(F: NatMatrix) -> tuple[Edge, ...]:
    """All edges of ``F`` in canonical ``(v, w, alpha)`` order."""
    return tuple(Edge(v, a, w)
                 for v, row in enumerate(F.data)
                 for w, x in enumerate(row)
                 for a in range(x))


@lru_cache(maxsize=4096)
def _edges_from(F: NatMatrix) -> tuple[tuple[Edge, ...], ...]:
    out: list[list[Edge]] = [[] for _ in range(F.rows.size)]
    for e in edge_set(F):
        out[e.v].append(e)
    return tuple(map(tuple, out))


def check_admissible(family: Sequence[NatMatrix]) -> None:
    if not family:
        raise IncompatibleIndexSets("empty path family")
    for F, G in zip(family, family[1:]):
        if F.cols != G.rows:
            raise IncompatibleIndexSets(
                f"family not admissible: {F.cols.name} followed by {G.rows.name}")


@lru_cache(maxsize=1024)
def path_space(family: PathFamily) -> tuple[Path, ...]:
    """All composable paths over ``family``, lexicographic in edge order."""
    family = tuple(family)
    check_admissible(family)
    paths: list[Path] = [(e,) for e in edge_set(family[0])]
    for F in family[1:]:
        nxt = _edges_from(F)
        paths = [p + (e,) for p in paths for e in nxt[p[-1].w]]
    return tuple(paths)


def composite_ends(family: Sequence[NatMatrix]):
    return family[0].rows, family[-1].cols


@dataclass(frozen=True, eq=False)
class PathIso:
    """An explicit bijection between the path spaces of two families."""

    domain: PathFamily
    codomain: PathFamily
    table: Mapping[Path, Path]

    def __post_init__(self) -> None:
        object.__setattr__(self, "domain", tuple(self.domain))
        object.__setattr__(self, "codomain", tuple(self.codomain))
        if not isinstance(self.table, MappingProxyType):
            object.__setattr__(self, "table", MappingProxyType(dict(self.table)))

    def __call__(self, p: Path) -> Path:
        return self.table[p]

    def __len__(self) -> int:
        return len(self.table)

    def __eq__(self, other) -> bool:
        if not isinstance(other, PathIso):
            return NotImplemented
        return (self.domain == other.domain and self.codomain == other.codomain
                and dict(self.table) == dict(other.table))

    def __hash__(self) -> int:
        return hash((self.domain, self.codomain, len(self.table)))

    def items(self) -> list[tuple[Path, Path]]:
        """Pairs in canonical domain order."""
        return sorted(self.table.items(), key=lambda kv: path_key(kv[0]))


@dataclass(frozen=True)
class IsoReport:
    ok: bool
    kind: str = ""
    path: Path | None = None
    message: str = ""

    def __bool__(self) -> bool:
        return self.ok


OK = IsoReport(True)


def validate_path_iso(phi: PathIso) -> IsoReport:
    """Check totality, bijectivity and endpoint preservation.

    The report names the first offending path in canonical order.
    """
    try:
        check_admissible(phi.domain)
        check_admissible(phi.codomain)
    except IncompatibleIndexSets as exc:
        return IsoReport(False, "family", None, str(exc))
    if composite_ends(phi.domain) != composite_ends(phi.codomain):
        return IsoReport(False, "index-sets", None,
                         "domain and codomain have different composite endpoints")
    dom = path_space(phi.domain)
    cod = set(path_space(phi.codomain))
    table = phi.table
    seen: set[Path] = set()
    for p in dom:
        q = table.get(p)
        if q is None:
            return IsoReport(False, "totality", p, "path has no image")
        if q not in cod:
            return IsoReport(False, "codomain", p, f"image {q} is not a codomain path")
        if q[0].v != p[0].v:
            return IsoReport(False, "source", p, f"source {p[0].v} sent to {q[0].v}")
        if q[-1].w != p[-1].w:
            return IsoReport(False, "range", p, f"range {p[-1].w} sent to {q[-1].w}")
        if q in seen:
            return IsoReport(False, "bijectivity", p, f"image {q} is hit twice")
        seen.add(q)
    if len(table) != len(dom):
        dom_set = set(dom)
        extra = sorted((p for p in table if p not in dom_set), key=path_key)
        return IsoReport(False, "domain", extra[0] if extra else None,
                         "table has entries outside the domain path space")
    if len(seen) != len(cod):
        missed = min((q for q in cod if q not in seen), key=path_key)
        return IsoReport(False, "bijectivity", missed, "codomain path is not hit")
    return OK


def identity_iso(family: Sequence[NatMatrix]) -> PathIso:
    family = tuple(family)
    return PathIso(family, family, {p: p for p in path_space(family)})


def compose(inner: PathIso, outer: PathIso) -> PathIso:
    """``outer ∘ inner``: apply ``inner`` first."""
    if inner.codomain != outer.domain:
        raise IncompatibleIndexSets("inner codomain differs from outer domain")
    o = outer.table
    return PathIso(inner.domain, outer.codomain, {p: o[q] for p, q in inner.table.items()})


def compose_all(*isos: PathIso) -> PathIso:
    """Compose in application order: ``compose_all(f, g, h) = h ∘ g ∘ f``."""
    out = isos[0]
    for nxt in isos[1:]:
        out = compose(out, nxt)
    return out


def cross(left: PathIso, right: PathIso) -> PathIso:
    """``left × right`` acting blockwise on concatenated paths."""
    if left.domain[-1].cols != right.domain[0].rows:
        raise IncompatibleIndexSets("cross product of non-composable domains")
    if left.codomain[-1].cols != right.codomain[0].rows:
        raise IncompatibleIndexSets("cross product of non-composable codomains")
    k = len(left.domain)
    lt, rt = left.table, right.table
    domain = left.domain + right.domain
    return PathIso(domain, left.codomain + right.codomain,
                   {p: lt[p[:k]] + rt[p[k:]] for p in path_space(domain)})


def invert(phi: PathIso) -> PathIso:
    return PathIso(phi.codomain, phi.domain, {q: p for p, q in phi.table.items()})


def apply_lift(phi_table: Mapping[Path, Path], a: Sequence[Edge], r: Edge) -> Path:
    """Evaluate the staircase lift on ``(a_1..a_m, r)``: rightmost factor first."""
    bs: list[Edge] = []
    for ai in reversed(a):
        r, b = phi_table[(ai, r)]
        bs.append(b)
    bs.reverse()
    return (r,) + tuple(bs)


def lift_power(phi: PathIso, m: int) -> PathIso:
    """``φ^(m)`` from ``φ: E_A × E_R → E_R × E_B``."""
    if len(phi.domain) != 2 or len(phi.codomain) != 2:
        raise IncompatibleIndexSets("lift_power needs a two-factor map")
    A, R = phi.domain
    R2, B = phi.codomain
    if R2 != R or not A.is_square or not B.is_square:
        raise IncompatibleIndexSets("lift_power needs a map E_A x E_R -> E_R x E_B")
    if m < 1:
        raise ValueError("lag must be positive")
    if m == 1:
        return phi
    domain = (A,) * m + (R,)
    t = phi.table
    return PathIso(domain, (R,) + (B,) * m,
                   {p: apply_lift(t, p[:m], p[m]) for p in path_space(domain)})


@lru_cache(maxsize=256)
def _power_classes(A: NatMatrix, j: int) -> dict:
    classes: dict[tuple[int, int], list[Path]] = {}
    for p in path_space((A,) * j):
        classes.setdefault(endpoints(p), []).append(p)
    return classes


def to_power_edge(p: Path, A: NatMatrix) -> Edge:
    """The edge of ``E_{A^j}`` corresponding to the ``j``-path ``p`` over ``A``."""
    cls = _power_classes(A, len(p))[endpoints(p)]
    return Edge(p[0].v, cls.index(p), p[-1].w)


def from_power_edge(e: Edge, A: NatMatrix, j: int) -> Path:
    """Inverse of :func:`to_power_edge`."""
    try:
        return _power_classes(A, j)[(e.v, e.w)][e.alpha]
    except (KeyError, IndexError):
        raise IncompatibleIndexSets(f"{e} is not an edge of the power {j}") from None


def flatten(p: Sequence[Edge], family: Sequence[NatMatrix], base: NatMatrix | None = None,
            exponents: Sequence[int] | None = None) -> Path:
    """Re-associate a path whose factors are powers of one square matrix.

    Factor ``i`` is an edge of ``E_{base^exponents[i]}``; the result is the
    flat tuple of ``E_base`` edges.  Without ``exponents`` every factor must
    be ``base`` itself.
    """
    family = tuple(family)
    base = base if base is not None else family[0]
    if not base.is_square:
        raise IncompatibleIndexSets("flatten needs a square base matrix")
    exponents = tuple(exponents) if exponents is not None else (1,) * len(family)
    if len(exponents) != len(family) or len(p) != len(family):
        raise IncompatibleIndexSets("path, family and exponents disagree in length")
    out: list[Edge] = []
    for e, F, j in zip(p, family, exponents):
        if F != mat_pow(base, j):
            raise IncompatibleIndexSets("mixed base matrices in flatten")
        out.extend(from_power_edge(e, base, j) if j > 1 else (e,))
    return tuple(out)


def lexicographic_matching(domain: Iterable[Path], codomain: Iterable[Path]) -> dict:
    """Match two equinumerous families class by class in canonical order."""
    classes: dict[tuple[int, int], list[Path]] = {}
    for q in codomain:
        classes.setdefault(endpoints(q), []).append(q)
    cursor: dict[tuple[int, int], int] = {}
    table = {}
    for p in domain:
        key = endpoints(p)
        i = cursor.get(key, 0)
        bucket = classes.get(key, [])
        if i >= len(bucket):
            raise IncompatibleIndexSets(f"endpoint class {key} is larger in the domain")
        table[p] = bucket[i]
        cursor[key] = i + 1
    for key, bucket in classes.items():
        if cursor.get(key, 0) != len(bucket):
            raise IncompatibleIndexSets(f"endpoint class {key} is larger in the codomain")
    return table
