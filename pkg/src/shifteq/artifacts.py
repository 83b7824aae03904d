"""JSON artifact files: parsing with invariant checks and canonical serialization."""

from __future__ import annotations

import json
from dataclasses import dataclass
from pathlib import Path as FsPath
from typing import Any

from .correspondence import CorrDescriptor
from .errors import InvariantViolation, ParseError
from .matrices import OMEGA, CardMatrix, IndexSet, NatMatrix, _Matrix
from .pathspace import Edge, PathIso, validate_path_iso
from .search import SearchOutcome, SSEChain
from .shifts import ConcreteShift, validate_concrete_shift

FORMAT_VERSION = 1
KINDS = ("matrix", "chain", "concrete-shift", "descriptor", "path-iso", "se-witness", "search-outcome")


@dataclass(frozen=True)
class ArtifactFile:
    kind: str
    payload: Any
    format_version: int = FORMAT_VERSION


# ---------------------------------------------------------------------------
# serialization


def _entry_out(x):
    return "w" if x is OMEGA else x


def matrix_to_json(M: _Matrix) -> dict:
    out = {"rows": M.rows.name, "cols": M.cols.name,
           "data": [[_entry_out(x) for x in r] for r in M.data]}
    if M.rows.size == 0 or M.cols.size == 0:
        out["shape"] = [M.rows.size, M.cols.size]
    return out


def _path_out(p) -> list:
    return [[e.v, e.alpha, e.w] for e in p]


_FAMILY_NAMES = {
    "phi_R": (["A", "R"], ["R", "B"]),
    "phi_S": (["B", "S"], ["S", "A"]),
    "psi_A": (["R", "S"], None),
    "psi_B": (["S", "R"], None),
}


def shift_to_json(cs: ConcreteShift) -> dict:
    mats = {"A": cs.A, "B": cs.B, "R": cs.R, "S": cs.S}
    maps = {}
    for key, (dom, cod) in _FAMILY_NAMES.items():
        if cod is None:
            cod = ["A" if key == "psi_A" else "B"] * cs.m
        maps[key] = {"domain": dom, "codomain": cod,
                     "pairs": [[_path_out(p), _path_out(q)] for p, q in getattr(cs, key).items()]}
    return {"lag": cs.m, "matrices": {k: matrix_to_json(v) for k, v in mats.items()}, "maps": maps}


def chain_to_json(chain: SSEChain) -> dict:
    return {"A": matrix_to_json(chain.A), "B": matrix_to_json(chain.B),
            "steps": [{"R": matrix_to_json(R), "S": matrix_to_json(S)} for R, S in chain.steps]}


def descriptor_to_json(X: CorrDescriptor) -> dict:
    return {"left_dims": [_entry_out(d) for d in X.left_dims],
            "right_dims": [_entry_out(d) for d in X.right_dims],
            "mult": matrix_to_json(X.mult)}


def se_witness_to_json(A, B, R, S, lag: int) -> dict:
    return {"lag": lag, "A": matrix_to_json(A), "B": matrix_to_json(B),
            "R": matrix_to_json(R), "S": matrix_to_json(S)}


def _payload_json(kind: str, value) -> dict:
    if kind == "matrix":
        return matrix_to_json(value)
    if kind == "chain":
        return chain_to_json(value)
    if kind == "concrete-shift":
        return shift_to_json(value)
    if kind == "descriptor":
        return descriptor_to_json(value)
    if kind == "path-iso":
        phi = value
        mats: dict = {}
        for F in phi.domain + phi.codomain:
            if not any(F == M for M in mats.values()):
                mats[f"M{len(mats)}"] = F
        return {"matrices": {k: matrix_to_json(M) for k, M in mats.items()},
                "domain": [_lookup(F, mats) for F in phi.domain],
                "codomain": [_lookup(F, mats) for F in phi.codomain],
                "pairs": [[_path_out(p), _path_out(q)] for p, q in phi.items()]}
    if kind == "se-witness":
        return se_witness_to_json(*value)
    if kind == "search-outcome":
        out: SearchOutcome
        out, wkind = value
        body = {"status": out.status.value, "certificate": out.certificate, "nodes": out.nodes}
        if out.witness is not None:
            w = out.witness
            body["witness"] = dict(_payload_json(wkind, w), kind=wkind)
        return body
    raise ValueError(f"unknown artifact kind {kind!r}")


def _lookup(F, mats: dict) -> str:
    return next(k for k, M in mats.items() if M == F)


def to_json(kind: str, value) -> dict:
    body = _payload_json(kind, value)
    return dict(body, kind=kind, format_version=FORMAT_VERSION)


def render(obj, depth: int = 0) -> str:
    """Canonical JSON text for ``obj``."""
    # lists of scalars stay on one line so matrix rows and edges read naturally
    pad = " " * (depth + 1)
    if isinstance(obj, dict):
        if not obj:
            return "{}"
        items = [f"{pad}{json.dumps(k, ensure_ascii=False)}: {render(obj[k], depth + 1)}"
                 for k in sorted(obj)]
        return "{\n" + ",\n".join(items) + "\n" + " " * depth + "}"
    if isinstance(obj, list) and any(isinstance(x, (dict, list)) for x in obj):
        return "[\n" + ",\n".join(pad + render(x, depth + 1) for x in obj) + "\n" + " " * depth + "]"
    return json.dumps(obj, ensure_ascii=False, separators=(", ", ": "))


def dumps(kind: str, value) -> str:
    """Canonical text: sorted keys, fixed pair order, trailing newline."""
    return render(to_json(kind, value)) + "\n"


def save(path, kind: str, value) -> None:
    FsPath(path).write_text(dumps(kind, value), encoding="utf-8")


# ---------------------------------------------------------------------------
# parsing


class _Ctx:
    """Index-set registry: a name must always denote the same size."""

    def __init__(self) -> None:
        self.sets: dict[str, IndexSet] = {}

    def index_set(self, name, size: int, where: str) -> IndexSet:
        if not isinstance(name, str) or not name:
            raise ParseError("index set name must be a nonempty string", where)
        known = self.sets.get(name)
        if known is not None and known.size != size:
            raise InvariantViolation("index-set consistency",
                                     f"{name} has sizes {known.size} and {size} ({where})")
        s = known or IndexSet(name, size)
        self.sets[name] = s
        return s


def _need(obj: dict, key: str, where: str):
    if not isinstance(obj, dict):
        raise ParseError("expected an object", where)
    if key not in obj:
        raise ParseError(f"missing field {key!r}", where)
    return obj[key]


def _entry_in(x, where: str, allow_omega: bool):
    if x == "w" and isinstance(x, str):
        if not allow_omega:
            raise InvariantViolation("finite entries", f"ω not allowed at {where}")
        return OMEGA
    if not isinstance(x, int) or isinstance(x, bool):
        raise ParseError(f"entry {x!r} is not an integer or \"w\"", where)
    if x < 0:
        raise InvariantViolation("nonnegative entries", f"{x} at {where}")
    return x


def matrix_from_json(obj, ctx: _Ctx, where: str = "matrix", allow_omega: bool = True) -> _Matrix:
    data = _need(obj, "data", where)
    if not isinstance(data, list) or not all(isinstance(r, list) for r in data):
        raise ParseError("data must be a list of rows", f"{where}.data")
    shape = obj.get("shape")
    n = len(data)
    k = len(data[0]) if data else 0
    if shape is not None:
        if (not isinstance(shape, list) or len(shape) != 2
                or not all(isinstance(x, int) and x >= 0 for x in shape)):
            raise ParseError("shape must be [rows, cols]", f"{where}.shape")
        if data and shape != [n, k]:
            raise InvariantViolation("dimensions match index sets", f"shape {shape} at {where}")
        n, k = shape
    for i, r in enumerate(data):
        if len(r) != k:
            raise InvariantViolation("dimensions match index sets", f"ragged row {i} at {where}")
    rows = ctx.index_set(_need(obj, "rows", where), n, f"{where}.rows")
    cols = ctx.index_set(_need(obj, "cols", where), k, f"{where}.cols")
    entries = tuple(tuple(_entry_in(x, f"{where}.data[{i}][{j}]", allow_omega)
                          for j, x in enumerate(r)) for i, r in enumerate(data))
    if any(x is OMEGA for r in entries for x in r):
        return CardMatrix(rows, cols, entries)
    return NatMatrix(rows, cols, entries)


def _nat(M: _Matrix, where: str) -> NatMatrix:
    if not isinstance(M, NatMatrix):
        raise InvariantViolation("finite entries", f"ω not allowed at {where}")
    return M


def _path_in(obj, where: str) -> tuple:
    if not isinstance(obj, list) or not obj:
        raise ParseError("path must be a nonempty list of edges", where)
    out = []
    for i, e in enumerate(obj):
        if (not isinstance(e, list) or len(e) != 3
                or not all(isinstance(x, int) and not isinstance(x, bool) for x in e)):
            raise ParseError("edge must be [v, alpha, w]", f"{where}[{i}]")
        out.append(Edge(*e))
    return tuple(out)


def iso_from_json(obj, mats: dict, where: str) -> PathIso:
    fams = []
    for key in ("domain", "codomain"):
        names = _need(obj, key, where)
        if not isinstance(names, list) or not names:
            raise ParseError(f"{key} must be a nonempty list of matrix names", f"{where}.{key}")
        fam = []
        for nm in names:
            if nm not in mats:
                raise ParseError(f"unknown matrix {nm!r}", f"{where}.{key}")
            fam.append(mats[nm])
        fams.append(tuple(fam))
    pairs = _need(obj, "pairs", where)
    if not isinstance(pairs, list):
        raise ParseError("pairs must be a list", f"{where}.pairs")
    table = {}
    for i, pq in enumerate(pairs):
        if not isinstance(pq, list) or len(pq) != 2:
            raise ParseError("pair must be [path, path]", f"{where}.pairs[{i}]")
        p = _path_in(pq[0], f"{where}.pairs[{i}][0]")
        q = _path_in(pq[1], f"{where}.pairs[{i}][1]")
        if p in table:
            raise InvariantViolation("bijection", f"{where}: path listed twice at pairs[{i}]")
        table[p] = q
    return PathIso(fams[0], fams[1], table)


def _iso_checked(phi: PathIso, where: str) -> PathIso:
    rep = validate_path_iso(phi)
    if not rep:
        raise InvariantViolation(f"bijection ({rep.kind})", f"{where}: {rep.message}")
    return phi


def _lag(x, where: str) -> int:
    if not isinstance(x, int) or isinstance(x, bool) or x < 1:
        raise InvariantViolation("lag >= 1", f"{x!r} at {where}")
    return x


def _dims_in(obj, where: str) -> tuple:
    if not isinstance(obj, list):
        raise ParseError("dims must be a list", where)
    out = []
    for i, d in enumerate(obj):
        if d == "w" and isinstance(d, str):
            out.append(OMEGA)
        elif isinstance(d, int) and not isinstance(d, bool):
            if d < 1:
                raise InvariantViolation("positive dimensions", f"{d} at {where}[{i}]")
            out.append(d)
        else:
            raise ParseError(f"dimension {d!r} is not an integer or \"w\"", f"{where}[{i}]")
    return tuple(out)


def from_json(obj) -> ArtifactFile:
    if not isinstance(obj, dict):
        raise ParseError("top level must be an object", "$")
    kind = obj.get("kind")
    if kind is None and {"rows", "cols", "data"} <= set(obj):
        kind = "matrix"
    if kind not in KINDS:
        raise ParseError(f"unknown kind {kind!r}", "kind")
    version = obj.get("format_version", FORMAT_VERSION)
    if version != FORMAT_VERSION:
        raise ParseError(f"unsupported format_version {version!r}", "format_version")
    ctx = _Ctx()
    return ArtifactFile(kind, _parse_payload(kind, obj, ctx), version)


def _parse_payload(kind: str, obj: dict, ctx: _Ctx):
    if kind == "matrix":
        return matrix_from_json(obj, ctx, "$")
    if kind == "chain":
        A = matrix_from_json(_need(obj, "A", "$"), ctx, "A")
        B = matrix_from_json(_need(obj, "B", "$"), ctx, "B")
        steps_in = _need(obj, "steps", "$")
        if not isinstance(steps_in, list):
            raise ParseError("steps must be a list", "steps")
        steps = tuple((matrix_from_json(_need(st, "R", f"steps[{i}]"), ctx, f"steps[{i}].R"),
                       matrix_from_json(_need(st, "S", f"steps[{i}]"), ctx, f"steps[{i}].S"))
                      for i, st in enumerate(steps_in))
        chain = SSEChain(A, B, steps)
        errs = chain.failures()
        if errs:
            raise InvariantViolation("chain equations", "; ".join(errs))
        return chain
    if kind == "concrete-shift":
        m = _lag(_need(obj, "lag", "$"), "lag")
        mats_in = _need(obj, "matrices", "$")
        mats = {k: _nat(matrix_from_json(_need(mats_in, k, "matrices"), ctx, f"matrices.{k}"),
                        f"matrices.{k}") for k in ("A", "B", "R", "S")}
        maps_in = _need(obj, "maps", "$")
        maps = {k: iso_from_json(_need(maps_in, k, "maps"), mats, f"maps.{k}")
                for k in ConcreteShift.MAPS}
        for k, phi in maps.items():
            _iso_checked(phi, f"maps.{k}")
        cs = ConcreteShift(mats["A"], mats["B"], mats["R"], mats["S"], m, **maps)
        rep = validate_concrete_shift(cs)
        if not rep:
            raise InvariantViolation(f"concrete shift ({rep.kind})", rep.detail)
        return cs
    if kind == "descriptor":
        mult = matrix_from_json(_need(obj, "mult", "$"), ctx, "mult")
        try:
            return CorrDescriptor(_dims_in(_need(obj, "left_dims", "$"), "left_dims"),
                                  _dims_in(_need(obj, "right_dims", "$"), "right_dims"), mult)
        except Exception as exc:
            raise InvariantViolation("descriptor dimensions", str(exc)) from None
    if kind == "path-iso":
        mats_in = _need(obj, "matrices", "$")
        if not isinstance(mats_in, dict):
            raise ParseError("matrices must be an object", "matrices")
        mats = {k: _nat(matrix_from_json(v, ctx, f"matrices.{k}"), f"matrices.{k}")
                for k, v in mats_in.items()}
        return _iso_checked(iso_from_json(obj, mats, "$"), "$")
    if kind == "se-witness":
        m = _lag(_need(obj, "lag", "$"), "lag")
        A, B, R, S = (_nat(matrix_from_json(_need(obj, k, "$"), ctx, k), k) for k in "ABRS")
        from .matrices import mat_mul, mat_pow, same_entries
        try:
            ok = (same_entries(mat_mul(A, R), mat_mul(R, B)) and same_entries(mat_mul(B, S), mat_mul(S, A))
                  and same_entries(mat_mul(R, S), mat_pow(A, m)) and same_entries(mat_mul(S, R), mat_pow(B, m)))
        except Exception as exc:
            raise InvariantViolation("shift equivalence equations", str(exc)) from None
        if not ok:
            raise InvariantViolation("shift equivalence equations", f"lag {m}")
        return (A, B, R, S, m)
    if kind == "search-outcome":
        from .search import Status
        status = _need(obj, "status", "$")
        try:
            st = Status(status)
        except ValueError:
            raise ParseError(f"unknown status {status!r}", "status") from None
        witness = None
        if "witness" in obj:
            w = from_json(obj["witness"])
            witness = w.payload
        return SearchOutcome(st, witness, obj.get("certificate"), obj.get("nodes", 0))
    raise ParseError(f"unknown kind {kind!r}", "kind")


def loads(text: str) -> ArtifactFile:
    try:
        obj = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ParseError(exc.msg, f"line {exc.lineno} column {exc.colno}") from None
    return from_json(obj)


def load_artifact(path) -> ArtifactFile:
    try:
        raw = FsPath(path).read_bytes()
    except OSError as exc:
        raise ParseError(str(exc), str(path)) from None
    try:
        text = raw.decode("utf-8")
    except UnicodeDecodeError as exc:
        raise ParseError(f"invalid UTF-8: {exc.reason}", f"byte {exc.start}") from None
    return loads(text)
