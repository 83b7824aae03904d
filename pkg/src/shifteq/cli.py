"""Command-line front end.

Exit codes: 0 for FOUND, success or a true verdict; 1 for NONE or false;
2 for UNKNOWN; 3 for errors in the input or in a run; 64 for usage errors.
"""

from __future__ import annotations

import argparse
import random
import sys
from pathlib import Path

from . import artifacts
from .corpus import BUNDLED, a_k, b_k, bundled_text
from .correspondence import CorrDescriptor, descriptor_from_matrix, descriptor_predicates, tensor_descriptor
from .errors import InvariantViolation, ParseError, ShiftEqError
from .matrices import NatMatrix, _Matrix
from .reduction import essentialize_chain, trim_chain
from .search import (SearchCaps, SearchOutcome, SSEChain, Status, default_node_budget, factor_elementary,
                     search_aligned, search_se, search_se_upto, search_sse_chain)
from .shifts import ConcreteShift, classify

EXIT_ERROR = 3
EXIT_USAGE = 64


class _Parser(argparse.ArgumentParser):
    def error(self, message: str):
        self.print_help(sys.stderr)
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


def _positive(text: str) -> int:
    try:
        v = int(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"{text!r} is not an integer") from None
    if v < 1:
        raise argparse.ArgumentTypeError(f"{text!r} must be at least 1")
    return v


def _nonneg(text: str) -> int:
    try:
        v = int(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"{text!r} is not an integer") from None
    if v < 0:
        raise argparse.ArgumentTypeError(f"{text!r} must be nonnegative")
    return v


def _range(text: str) -> tuple[int, int]:
    lo, sep, hi = text.partition("..")
    if not sep:
        lo = hi = text
    a, b = _positive(lo), _positive(hi)
    if b < a:
        raise argparse.ArgumentTypeError(f"empty range {text!r}")
    return a, b


def _global_options(p: argparse.ArgumentParser) -> None:
    # SUPPRESS lets the flags sit before or after the subcommand
    p.add_argument("--seed", type=_nonneg, default=argparse.SUPPRESS,
                   help="seed for generated instances")
    p.add_argument("--threads", type=_positive, default=argparse.SUPPRESS,
                   help="accepted for compatibility; searches run on one thread")
    p.add_argument("-o", "--output", default=argparse.SUPPRESS, help="output file (directory for examples)")


def _search_options(p: argparse.ArgumentParser, inner: bool = False, lag: bool = False) -> None:
    p.add_argument("--entry-cap", type=_positive, default=12, help="largest entry tried in R and S")
    p.add_argument("--node-budget", type=_positive, default=None,
                   help="search node budget (default: $SHIFTEQ_NODE_BUDGET or 2000000)")
    if inner:
        p.add_argument("--inner-dims", type=_range, default=(1, 3), metavar="a..b",
                       help="sizes allowed for intermediate index sets")
    if lag:
        p.add_argument("--max-lag", type=_positive, default=3)


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    _global_options(common)
    parser = _Parser(prog="shifteq", parents=[common],
                     description="Exact shift equivalence tools for nonnegative integer matrices.")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    p = sub.add_parser("verify-shift", parents=[common], help="classify a concrete shift file")
    p.add_argument("shift")

    p = sub.add_parser("search-elementary", parents=[common], help="search A = RS, SR = B")
    p.add_argument("A")
    p.add_argument("B")
    _search_options(p, inner=True)

    p = sub.add_parser("search-se", parents=[common], help="search a shift equivalence")
    p.add_argument("A")
    p.add_argument("B")
    g = p.add_mutually_exclusive_group()
    g.add_argument("--lag", type=_positive, help="search this lag only")
    g.add_argument("--max-lag", type=_positive, help="try lags 1..L (default 3)")
    _search_options(p)

    p = sub.add_parser("search-sse", parents=[common], help="search a strong shift equivalence chain")
    p.add_argument("A")
    p.add_argument("B")
    _search_options(p, inner=True, lag=True)

    p = sub.add_parser("search-aligned", parents=[common],
                       help="search path isomorphisms making an aligned concrete shift")
    p.add_argument("A")
    p.add_argument("B")
    p.add_argument("--lag", type=_positive, required=True)
    p.add_argument("--with", nargs=2, required=True, metavar=("R", "S"), dest="with_")
    _search_options(p)

    p = sub.add_parser("regularize", parents=[common], help="make chain intermediates essential")
    p.add_argument("chain")

    p = sub.add_parser("trim", parents=[common], help="trim a chain to finite intermediates")
    p.add_argument("chain")

    p = sub.add_parser("tensor", parents=[common], help="compose two descriptors or matrices")
    p.add_argument("X")
    p.add_argument("Y")

    p = sub.add_parser("examples", parents=[common], help="write the bundled example files")
    p.add_argument("--ak", type=_positive, metavar="k", help="also write A_k and B_k")
    p.add_argument("--random", type=_nonneg, default=0, metavar="N",
                   help="also write N seeded random concrete shifts")
    return parser


# ---------------------------------------------------------------------------
# helpers


def _load(path: str, *kinds: str):
    art = artifacts.load_artifact(path)
    if art.kind not in kinds:
        raise ParseError(f"expected {' or '.join(kinds)}, found {art.kind}", path)
    return art.payload


def _load_nat(path: str) -> NatMatrix:
    M = _load(path, "matrix")
    if not isinstance(M, NatMatrix):
        raise InvariantViolation("finite entries", f"{path} contains ω")
    return M


def _fmt(M: _Matrix) -> str:
    return "[" + ", ".join("[" + ", ".join(str(x) for x in r) + "]" for r in M.data) + "]"


def _write(args, kind: str, value) -> None:
    out = getattr(args, "output", None)
    if out is None:
        return
    artifacts.save(out, kind, value)
    print(f"wrote {out}")


def _caps(args, **kw) -> SearchCaps:
    budget = args.node_budget if args.node_budget is not None else default_node_budget()
    return SearchCaps(entry_cap=args.entry_cap, node_budget=budget, **kw)


def _describe_certificate(cert: dict | None) -> str:
    if not cert:
        return ""
    kind = cert.get("kind")
    if kind == "rank":
        other = "W" if cert["matrix"] == "A" else "V"
        power = f"^{cert['lag']}" if cert.get("lag", 1) != 1 else ""
        return (f"rank certificate: rank({cert['matrix']}{power}) = {cert['rank']} > "
                f"|{other}| = {cert['inner_dim']}")
    if kind == "trace":
        return (f"trace certificate: tr(A^{cert['power']}) = {cert['trace_A']} != "
                f"{cert['trace_B']} = tr(B^{cert['power']})")
    if kind == "exhausted":
        return "exhausted every candidate within the derived entry bounds"
    if kind == "budget":
        return f"node budget {cert['node_budget']} exhausted"
    if kind == "cap":
        return "search caps reached: " + ", ".join(f"{k}={v}" for k, v in sorted(cert.items()) if k != "kind")
    if kind == "per-lag":
        return "\n".join(f"lag {i + 1}: {c['status']}" + (f" ({_describe_certificate(c)})" if c.get("kind") else "")
                         for i, c in enumerate(cert["per_lag"]))
    return str(cert)


def _report(out: SearchOutcome, args, wkind: str, witness=None, lines=()) -> int:
    print(out.status.value)
    for line in lines:
        print(line)
    text = _describe_certificate(out.certificate)
    if text and out.status is not Status.FOUND:
        print(text)
    print(f"nodes: {out.nodes}")
    if witness is not None:
        out = SearchOutcome(out.status, witness, out.certificate, out.nodes)
    _write(args, "search-outcome", (out, wkind))
    return out.exit_code


# ---------------------------------------------------------------------------
# commands


def cmd_verify_shift(args) -> int:
    cs: ConcreteShift = _load(args.shift, "concrete-shift")
    res = classify(cs)
    for name in ("aligned", "balanced", "compatible"):
        holds = getattr(res, name)
        line = f"{name}: {'true' if holds else 'false'}"
        w = res.witnesses.get(name)
        if not holds and w is not None:
            line += "  first failure at " + " ".join(f"({e.v},{e.alpha},{e.w})" for e in w)
        print(line)
    if getattr(args, "output", None):
        Path(args.output).write_text(
            artifacts.render({"aligned": res.aligned, "balanced": res.balanced,
                               "compatible": res.compatible}) + "\n", encoding="utf-8")
    return 0 if all(res.flags) else 1


def cmd_search_elementary(args) -> int:
    A, B = _load_nat(args.A), _load_nat(args.B)
    lo, hi = args.inner_dims
    if not lo <= B.rows.size <= hi:
        out = SearchOutcome(Status.UNKNOWN, None,
                            {"kind": "cap", "inner_dims": [lo, hi], "inner_size": B.rows.size})
        return _report(out, args, "chain")
    out = factor_elementary(A, B, _caps(args, inner_dims=(lo, hi)))
    witness = None
    if out.status is Status.FOUND:
        R, S = out.witness
        witness = SSEChain(A, B, ((R, S),))
        return _report(out, args, "chain", witness, [f"R = {_fmt(R)}", f"S = {_fmt(S)}"])
    return _report(out, args, "chain")


def cmd_search_se(args) -> int:
    A, B = _load_nat(args.A), _load_nat(args.B)
    if args.lag is not None:
        out = search_se(A, B, args.lag, _caps(args, max_lag=args.lag))
        lag = args.lag
    else:
        out = search_se_upto(A, B, _caps(args, max_lag=args.max_lag or 3))
        lag = (out.certificate or {}).get("lag")
    if out.status is Status.FOUND:
        R, S = out.witness
        return _report(out, args, "se-witness", (A, B, R, S, lag),
                       [f"lag = {lag}", f"R = {_fmt(R)}", f"S = {_fmt(S)}"])
    return _report(out, args, "se-witness")


def cmd_search_sse(args) -> int:
    A, B = _load_nat(args.A), _load_nat(args.B)
    out = search_sse_chain(A, B, _caps(args, inner_dims=args.inner_dims, max_lag=args.max_lag))
    lines = []
    if out.status is Status.FOUND:
        lines.append(f"lag = {out.witness.lag}")
        for i, (R, S) in enumerate(out.witness.steps, 1):
            lines += [f"R_{i} = {_fmt(R)}", f"S_{i} = {_fmt(S)}"]
    return _report(out, args, "chain", lines=lines)


def cmd_search_aligned(args) -> int:
    A, B = _load_nat(args.A), _load_nat(args.B)
    R, S = (_load_nat(p) for p in args.with_)
    out = search_aligned(A, B, args.lag, R, S, _caps(args, max_lag=args.lag))
    lines = []
    if out.status is Status.FOUND:
        flags = classify(out.witness)
        lines.append(f"aligned: {str(flags.aligned).lower()}  balanced: {str(flags.balanced).lower()}  "
                     f"compatible: {str(flags.compatible).lower()}")
    return _report(out, args, "concrete-shift", lines=lines)


def _load_chain(path: str) -> SSEChain:
    value = _load(path, "chain", "search-outcome")
    if isinstance(value, SearchOutcome):
        if not isinstance(value.witness, SSEChain):
            raise ParseError("search outcome carries no chain witness", path)
        return value.witness
    return value


def _chain_report(chain: SSEChain) -> None:
    errs = chain.failures()
    sizes = [X.rows.size for X in chain.levels()]
    print(f"lag {chain.lag}, level sizes {sizes}")
    print("verification: " + ("ok" if not errs else "; ".join(errs)))


def _emit_chain(args, chain: SSEChain) -> None:
    if getattr(args, "output", None):
        _write(args, "chain", chain)
    else:
        sys.stdout.write(artifacts.dumps("chain", chain))


def cmd_regularize(args) -> int:
    chain = _load_chain(args.chain)
    out, report = essentialize_chain(chain)
    for act in report.actions:
        print(f"{act['phase']} at step {act['step']}: removed {act['removed_left']} | {act['removed_right']}")
    if not report.actions:
        print("already essential")
    _chain_report(out)
    _emit_chain(args, out)
    return 0


def cmd_trim(args) -> int:
    chain = _load_chain(args.chain)
    out, report = trim_chain(chain)
    print(f"forward pass: {report.forward}")
    print(f"backward pass: {report.backward}")
    print(f"kept: {report.kept}")
    print(f"infinite entries zeroed: {report.zeroed}")
    _chain_report(out)
    _emit_chain(args, out)
    return 0


def _as_descriptor(path: str) -> CorrDescriptor:
    value = _load(path, "matrix", "descriptor")
    return value if isinstance(value, CorrDescriptor) else descriptor_from_matrix(value)


def cmd_tensor(args) -> int:
    X, Y = _as_descriptor(args.X), _as_descriptor(args.Y)
    Z = tensor_descriptor(X, Y)
    print(f"mult = {_fmt(Z.mult)}")
    pred = descriptor_predicates(Z)
    print(" ".join(f"{k}={'yes' if getattr(pred, k) else 'no'}"
                   for k in ("injective", "proper", "full", "regular", "essential")))
    if getattr(args, "output", None):
        _write(args, "descriptor", Z)
    else:
        sys.stdout.write(artifacts.dumps("descriptor", Z))
    return 0


def cmd_examples(args) -> int:
    from .generate import random_concrete_shift

    out = Path(getattr(args, "output", None) or ".")
    out.mkdir(parents=True, exist_ok=True)
    written = []
    for name in BUNDLED:
        path = out / f"{name}.json"
        path.write_text(bundled_text(name), encoding="utf-8")
        written.append(path)
    if args.ak is not None:
        for label, M in (("A", a_k(args.ak)), ("B", b_k(args.ak))):
            path = out / f"{label}_{args.ak}.json"
            artifacts.save(path, "matrix", M)
            written.append(path)
    if args.random:
        rng = random.Random(getattr(args, "seed", 0))
        width = len(str(args.random - 1))
        for i in range(args.random):
            g = random_concrete_shift(rng, mutated=bool(i % 2))
            path = out / f"shift_{i:0{width}d}.json"
            artifacts.save(path, "concrete-shift", g.shift)
            written.append(path)
    for p in written:
        print(p)
    return 0


COMMANDS = {
    "verify-shift": cmd_verify_shift,
    "search-elementary": cmd_search_elementary,
    "search-se": cmd_search_se,
    "search-sse": cmd_search_sse,
    "search-aligned": cmd_search_aligned,
    "regularize": cmd_regularize,
    "trim": cmd_trim,
    "tensor": cmd_tensor,
    "examples": cmd_examples,
}


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return COMMANDS[args.command](args)
    except ShiftEqError as exc:
        print(f"shifteq: {type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_ERROR
    except (OSError, ValueError) as exc:
        print(f"shifteq: {exc}", file=sys.stderr)
        return EXIT_ERROR
