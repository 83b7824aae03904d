"""Concrete shifts and the aligned / balanced / compatible validators."""

from __future__ import annotations

from dataclasses import dataclass, field, replace

from .errors import BadLevel, NotAFactorization, TheoremViolation
from .matrices import NatMatrix, is_essential, mat_mul, mat_pow, same_entries
from .pathspace import (
    PathIso,
    apply_lift,
    compose,
    cross,
    identity_iso,
    invert,
    lexicographic_matching,
    lift_power,
    path_space,
    validate_path_iso,
)


@dataclass(frozen=True, eq=False)
class ConcreteShift:
    A: NatMatrix
    B: NatMatrix
    R: NatMatrix
    S: NatMatrix
    m: int
    phi_R: PathIso
    phi_S: PathIso
    psi_A: PathIso
    psi_B: PathIso

    MAPS = ("phi_R", "phi_S", "psi_A", "psi_B")

    def __eq__(self, other) -> bool:
        if not isinstance(other, ConcreteShift):
            return NotImplemented
        return all(getattr(self, f) == getattr(other, f)
                   for f in ("A", "B", "R", "S", "m") + self.MAPS)

    def __hash__(self) -> int:
        return hash((self.A, self.B, self.R, self.S, self.m))

    def with_map(self, name: str, iso: PathIso) -> "ConcreteShift":
        return replace(self, **{name: iso})

    def expected_families(self) -> dict[str, tuple[tuple, tuple]]:
        A, B, R, S, m = self.A, self.B, self.R, self.S, self.m
        return {
            "phi_R": ((A, R), (R, B)),
            "phi_S": ((B, S), (S, A)),
            "psi_A": ((R, S), (A,) * m),
            "psi_B": ((S, R), (B,) * m),
        }


@dataclass(frozen=True)
class ShiftReport:
    ok: bool
    kind: str = ""
    detail: str = ""
    path: tuple | None = None

    def __bool__(self) -> bool:
        return self.ok


@dataclass(frozen=True)
class CheckResult:
    """Outcome of one identity check; ``witness`` is the first failing point."""

    holds: bool
    witness: tuple | None = None
    identity: str = ""

    def __bool__(self) -> bool:
        return self.holds


@dataclass(frozen=True)
class ShiftClassification:
    aligned: bool
    balanced: bool
    compatible: bool
    witnesses: dict = field(default_factory=dict)

    @property
    def flags(self) -> tuple[bool, bool, bool]:
        return (self.aligned, self.balanced, self.compatible)

    def agree(self) -> bool:
        return len(set(self.flags)) == 1


def validate_concrete_shift(cs: ConcreteShift) -> ShiftReport:
    A, B, R, S = cs.A, cs.B, cs.R, cs.S
    if not isinstance(cs.m, int) or cs.m < 1:
        return ShiftReport(False, "shape", f"lag {cs.m!r} is not a positive integer")
    if not A.is_square or not B.is_square:
        return ShiftReport(False, "shape", "A and B must be square")
    if R.rows != A.rows or R.cols != B.rows:
        return ShiftReport(False, "shape", "R must be indexed by V x W")
    if S.rows != B.rows or S.cols != A.rows:
        return ShiftReport(False, "shape", "S must be indexed by W x V")
    for name, (dom, cod) in cs.expected_families().items():
        iso = getattr(cs, name)
        if iso.domain != dom or iso.codomain != cod:
            return ShiftReport(False, "shape", f"{name} has the wrong domain or codomain")
    checks = (
        ("AR = RB", mat_mul(A, R), mat_mul(R, B)),
        ("BS = SA", mat_mul(B, S), mat_mul(S, A)),
        ("A^m = RS", mat_pow(A, cs.m), mat_mul(R, S)),
        ("SR = B^m", mat_mul(S, R), mat_pow(B, cs.m)),
    )
    for label, lhs, rhs in checks:
        if not same_entries(lhs, rhs):
            return ShiftReport(False, "equation", f"{label} fails")
    for name in cs.MAPS:
        rep = validate_path_iso(getattr(cs, name))
        if not rep:
            return ShiftReport(False, f"path-iso:{name}", f"{rep.kind}: {rep.message}", rep.path)
    return ShiftReport(True)


def is_aligned(cs: ConcreteShift) -> CheckResult:
    pR, pS = cs.phi_R.table, cs.phi_S.table
    qA, qB = cs.psi_A.table, cs.psi_B.table
    for a, r, s in path_space((cs.A, cs.R, cs.S)):
        r1, b = pR[(a, r)]
        s1, a1 = pS[(b, s)]
        if qA[(r1, s1)] + (a1,) != (a,) + qA[(r, s)]:
            return CheckResult(False, (a, r, s), "aligned/A")
    for b, s, r in path_space((cs.B, cs.S, cs.R)):
        s1, a = pS[(b, s)]
        r1, b1 = pR[(a, r)]
        if qB[(s1, r1)] + (b1,) != (b,) + qB[(s, r)]:
            return CheckResult(False, (b, s, r), "aligned/B")
    return CheckResult(True)


def is_balanced(cs: ConcreteShift) -> CheckResult:
    m = cs.m
    lR = lift_power(cs.phi_R, m).table
    lS = lift_power(cs.phi_S, m).table
    qA, qB = cs.psi_A.table, cs.psi_B.table
    iA, iB = invert(cs.psi_A).table, invert(cs.psi_B).table
    for p in path_space((cs.A,) * m + (cs.R, cs.S)):
        a, r, s = p[:m], p[m], p[m + 1]
        r1, *bs = lR[a + (r,)]
        s1, *a1 = lS[tuple(bs) + (s,)]
        if (r1, s1) + tuple(a1) != iA[a] + qA[(r, s)]:
            return CheckResult(False, p, "balanced/A")
    for p in path_space((cs.B,) * m + (cs.S, cs.R)):
        b, s, r = p[:m], p[m], p[m + 1]
        s1, *as_ = lS[b + (s,)]
        r1, *b1 = lR[tuple(as_) + (r,)]
        if (s1, r1) + tuple(b1) != iB[b] + qB[(s, r)]:
            return CheckResult(False, p, "balanced/B")
    return CheckResult(True)


def is_compatible(cs: ConcreteShift) -> CheckResult:
    m = cs.m
    lR = lift_power(cs.phi_R, m).table
    lS = lift_power(cs.phi_S, m).table
    qA, qB = cs.psi_A.table, cs.psi_B.table
    iA, iB = invert(cs.psi_A).table, invert(cs.psi_B).table
    for p in path_space((cs.A,) * m + (cs.R,)):
        r1, s1 = iA[p[:m]]
        if lR[p] != (r1,) + qB[(s1, p[m])]:
            return CheckResult(False, p, "compatible/R")
    for p in path_space((cs.B,) * m + (cs.S,)):
        s1, r1 = iB[p[:m]]
        if lS[p] != (s1,) + qA[(r1, p[m])]:
            return CheckResult(False, p, "compatible/S")
    return CheckResult(True)


def classify(cs: ConcreteShift) -> ShiftClassification:
    """Run all three validators.

    On essential A and B the flags must agree; a disagreement raises
    :class:`TheoremViolation` since it can only come from a bug.
    """
    al, ba, co = is_aligned(cs), is_balanced(cs), is_compatible(cs)
    out = ShiftClassification(al.holds, ba.holds, co.holds,
                              {"aligned": al.witness, "balanced": ba.witness,
                               "compatible": co.witness})
    if not out.agree() and is_essential(cs.A) and is_essential(cs.B):
        raise TheoremViolation(f"flags {out.flags} disagree on essential matrices")
    return out


def check_intermediate_identity(cs: ConcreteShift, level: int) -> CheckResult:
    """Compare both sides of the level-``level`` identity pointwise.

    Left side: ``(id_R × φ_S^(ℓ))(φ_R^(ℓ) × id_S)``; right side:
    ``(ψ_A^{-1} × id_{A^ℓ})(id_{A^ℓ} × ψ_A)``, both on ``E_A^ℓ × E_R × E_S``.
    """
    m = cs.m
    if not isinstance(level, int) or not 1 <= level <= m:
        raise BadLevel(f"level {level!r} outside 1..{m}")
    pR, pS = cs.phi_R.table, cs.phi_S.table
    qA, iA = cs.psi_A.table, invert(cs.psi_A).table
    for p in path_space((cs.A,) * level + (cs.R, cs.S)):
        a, r, s = p[:level], p[level], p[level + 1]
        r1, *bs = apply_lift(pR, a, r)
        s1, *a1 = apply_lift(pS, bs, s)
        full = a + qA[(r, s)]
        if (r1, s1) + tuple(a1) != iA[full[:m]] + full[m:]:
            return CheckResult(False, p, f"intermediate/{level}")
    return CheckResult(True)


def build_lag1_compatible(A: NatMatrix, B: NatMatrix, R: NatMatrix, S: NatMatrix) -> ConcreteShift:
    """Compatible lag-1 shift from an elementary factorization A = RS, SR = B."""
    try:
        ok = same_entries(mat_mul(R, S), A) and same_entries(mat_mul(S, R), B)
    except Exception as exc:
        raise NotAFactorization(str(exc)) from exc
    if not ok:
        raise NotAFactorization("need A = RS and SR = B")
    psi_A = PathIso((R, S), (A,), lexicographic_matching(path_space((R, S)), path_space((A,))))
    psi_B = PathIso((S, R), (B,), lexicographic_matching(path_space((S, R)), path_space((B,))))
    id_R, id_S = identity_iso((R,)), identity_iso((S,))
    phi_R = compose(cross(invert(psi_A), id_R), cross(id_R, psi_B))
    phi_S = compose(cross(invert(psi_B), id_S), cross(id_S, psi_A))
    return ConcreteShift(A, B, R, S, 1, phi_R, phi_S, psi_A, psi_B)
