import json
import random
import subprocess
import sys

import pytest

from chains import backward_chain, example_chain, trim_corpus
from conftest import DATA, nat
from shifteq import artifacts
from shifteq.artifacts import dumps, load_artifact, loads
from shifteq.cli import main
from shifteq.corpus import BUNDLED, a_k, b_k, bundled_text, ex58, sink_chain
from shifteq.correspondence import descriptor_from_matrix, tensor_descriptor
from shifteq.errors import InvariantViolation, ParseError
from shifteq.generate import random_concrete_shift, theorem_suite
from shifteq.search import SearchOutcome, Status


# ---------------------------------------------------------------------------
# files


def test_bundled_example_matrices():
    A, B, C = ex58()
    assert A.data == ((1, 1, 0), (0, 0, 1), (1, 1, 1))
    assert B.data == ((1, 1), (1, 1))
    assert C.data == ((2,),)
    assert sink_chain().data == ((1, 1, 0), (0, 0, 1), (0, 0, 0))
    assert a_k(3).data == ((1, 3), (2, 1)) and b_k(3).data == ((1, 6), (1, 1))
    with pytest.raises(ValueError):
        a_k(0)


@pytest.mark.parametrize("name", BUNDLED)
def test_bundled_files_are_canonical(name):
    text = bundled_text(name)
    art = loads(text)
    assert dumps(art.kind, art.payload) == text
    assert loads(dumps(art.kind, art.payload)).payload == art.payload


def test_committed_test_data_roundtrips():
    for path in sorted(DATA.glob("*.json")):
        text = path.read_text(encoding="utf-8")
        art = loads(text)
        kind = art.kind
        value = art.payload
        if kind == "search-outcome":
            raw = json.loads(text)
            value = (value, raw["witness"]["kind"]) if "witness" in raw else (value, None)
        assert dumps(kind, value) == text, path.name


@pytest.mark.parametrize("seed", range(10))
def test_shift_roundtrip(seed):
    g = random_concrete_shift(random.Random(seed), mutated=bool(seed % 2))
    text = dumps("concrete-shift", g.shift)
    back = loads(text).payload
    assert back == g.shift
    assert dumps("concrete-shift", back) == text


def test_chain_and_descriptor_roundtrip():
    for chain in trim_corpus(count=6) + [backward_chain(), example_chain()]:
        text = dumps("chain", chain)
        assert dumps("chain", loads(text).payload) == text
    D = descriptor_from_matrix(loads('{"rows": "V", "cols": "W", "data": [[1, "w"], [0, 2]]}').payload)
    D = tensor_descriptor(D, descriptor_from_matrix(nat([[1, 0], [3, 1]], "W", "U")))
    text = dumps("descriptor", D)
    assert json.loads(text)["mult"]["data"] == [["w", "w"], [6, 2]]
    assert loads(text).payload == D


def test_path_iso_roundtrip():
    cs = theorem_suite(3, count=2)[0].shift
    text = dumps("path-iso", cs.phi_R)
    assert loads(text).payload == cs.phi_R
    assert dumps("path-iso", loads(text).payload) == text


def test_bare_matrix_literal_is_accepted():
    M = loads('{"rows": "V", "cols": "W", "data": [[1, "w"]]}').payload
    assert M.rows.name == "V" and M.cols.name == "W"
    assert not M.is_finite()


@pytest.mark.parametrize("text, where", [
    ('{"kind": "matrix", "rows": "V", "cols": "V", "data": [[1, 2]', "line 1"),
    ('[1, 2]', "$"),
    ('{"kind": "graph"}', "kind"),
    ('{"kind": "matrix", "rows": "V", "cols": "V"}', "$"),
    ('{"kind": "matrix", "rows": "V", "cols": "V", "data": [[true]]}', "data[0][0]"),
    ('{"kind": "matrix", "format_version": 9, "rows": "V", "cols": "V", "data": [[1]]}', "format_version"),
])
def test_parse_errors(text, where):
    with pytest.raises(ParseError) as info:
        loads(text)
    assert where in str(info.value)


@pytest.mark.parametrize("text, invariant", [
    ('{"rows": "V", "cols": "V", "data": [[1, 2], [1]]}', "dimensions match index sets"),
    ('{"rows": "V", "cols": "V", "data": [[-1]]}', "nonnegative entries"),
    ('{"kind": "chain", "A": {"rows": "V", "cols": "V", "data": [[1]]},'
     ' "B": {"rows": "V", "cols": "V", "data": [[1, 1], [1, 1]]}, "steps": []}', "index-set consistency"),
    ('{"kind": "chain", "A": {"rows": "V", "cols": "V", "data": [[1]]},'
     ' "B": {"rows": "W", "cols": "W", "data": [[2]]}, "steps": []}', "chain equations"),
])
def test_invariant_violations(text, invariant):
    with pytest.raises(InvariantViolation) as info:
        loads(text)
    assert info.value.invariant == invariant


def test_missing_psi_pair_is_not_a_bijection():
    cs = theorem_suite(11, count=1)[0].shift
    obj = json.loads(dumps("concrete-shift", cs))
    obj["maps"]["psi_A"]["pairs"].pop()
    with pytest.raises(InvariantViolation) as info:
        artifacts.from_json(obj)
    assert info.value.invariant.startswith("bijection")


def test_load_artifact_errors(tmp_path):
    bad = tmp_path / "bad.json"
    bad.write_bytes(b'{"rows": "V", "cols": "V", "data": [[1]] \xff}')
    with pytest.raises(ParseError, match="UTF-8"):
        load_artifact(bad)
    with pytest.raises(ParseError):
        load_artifact(tmp_path / "missing.json")


# ---------------------------------------------------------------------------
# command line


@pytest.fixture
def corpus(tmp_path):
    assert main(["examples", "-o", str(tmp_path), "--ak", "3"]) == 0
    return tmp_path


def test_examples_command(corpus, capsys):
    names = sorted(p.name for p in corpus.iterdir())
    assert names == sorted([f"{n}.json" for n in BUNDLED] + ["A_3.json", "B_3.json"])
    assert load_artifact(corpus / "A_3.json").payload.data == ((1, 3), (2, 1))
    assert load_artifact(corpus / "B_3.json").payload.data == ((1, 6), (1, 1))


def test_search_elementary_exit_codes(corpus, capsys):
    out = corpus / "ab.json"
    assert main(["search-elementary", str(corpus / "ex58_A.json"), str(corpus / "ex58_B.json"),
                 "-o", str(out)]) == 0
    result = load_artifact(out).payload
    assert result.status is Status.FOUND and result.witness.verify()
    capsys.readouterr()
    assert main(["search-elementary", str(corpus / "ex58_A.json"), str(corpus / "ex58_C.json")]) == 1
    text = capsys.readouterr().out
    assert text.startswith("NONE") and "rank certificate: rank(A) = 2 > |W| = 1" in text
    assert main(["search-elementary", str(corpus / "ex58_A.json"), str(corpus / "ex58_B.json"),
                 "--inner-dims", "3..3"]) == 2
    assert main(["search-elementary", str(corpus / "ex58_A.json"), str(corpus / "ex58_B.json"),
                 "--node-budget", "2"]) == 2


def test_search_se_outcomes(corpus, capsys):
    out = corpus / "se.json"
    code = main(["search-se", str(corpus / "A_3.json"), str(corpus / "B_3.json"), "--max-lag", "3",
                 "--entry-cap", "12", "-o", str(out)])
    assert code == 2
    assert load_artifact(out).payload.status is Status.UNKNOWN
    code = main(["search-se", str(corpus / "A_3.json"), str(corpus / "B_3.json"), "--lag", "3",
                 "--entry-cap", "16", "-o", str(out)])
    assert code == 0
    A, B, R, S, m = load_artifact(out).payload.witness
    assert m == 3 and R.data == ((1, 3), (1, 2))
    assert main(["search-se", str(corpus / "ex58_C.json"), str(corpus / "ex58_C.json"), "--lag", "1"]) == 0


def test_search_sse_and_chain_commands(corpus, capsys):
    out = corpus / "ac.json"
    assert main(["search-sse", str(corpus / "ex58_A.json"), str(corpus / "ex58_C.json"),
                 "--max-lag", "2", "--inner-dims", "1..2", "-o", str(out)]) == 0
    assert main(["search-sse", str(corpus / "ex58_A.json"), str(corpus / "ex58_C.json"),
                 "--max-lag", "1"]) == 2
    capsys.readouterr()
    trimmed = corpus / "t.json"
    assert main(["trim", str(out), "-o", str(trimmed)]) == 0
    assert "verification: ok" in capsys.readouterr().out
    assert load_artifact(trimmed).payload.lag == 2
    padded = corpus / "padded.json"
    artifacts.save(padded, "chain", trim_corpus(count=1)[0])
    assert main(["trim", str(padded), "-o", str(trimmed)]) == 0
    assert main(["regularize", str(padded), "-o", str(corpus / "r.json")]) == 0
    assert load_artifact(corpus / "r.json").payload.verify()


def test_verify_shift_and_search_aligned(tmp_path, capsys):
    good, bad = theorem_suite(5, count=2)
    artifacts.save(tmp_path / "good.json", "concrete-shift", good.shift)
    artifacts.save(tmp_path / "bad.json", "concrete-shift", bad.shift)
    assert main(["verify-shift", str(tmp_path / "good.json")]) == 0
    assert capsys.readouterr().out.splitlines() == ["aligned: true", "balanced: true", "compatible: true"]
    assert main(["verify-shift", str(tmp_path / "bad.json")]) == 1
    lines = capsys.readouterr().out.splitlines()
    assert [l.split(":")[0] for l in lines] == ["aligned", "balanced", "compatible"]
    assert "first failure at" in lines[0]

    cs = good.shift
    for name in "ABRS":
        artifacts.save(tmp_path / f"{name}.json", "matrix", getattr(cs, name))
    out = tmp_path / "aligned.json"
    code = main(["search-aligned", str(tmp_path / "A.json"), str(tmp_path / "B.json"), "--lag", str(cs.m),
                 "--with", str(tmp_path / "R.json"), str(tmp_path / "S.json"), "-o", str(out)])
    assert code == 0
    assert load_artifact(out).payload.status is Status.FOUND


def test_tensor_command(corpus, capsys):
    assert main(["tensor", str(corpus / "ex58_A.json"), str(corpus / "ex58_A.json")]) == 0
    text = capsys.readouterr().out
    assert text.startswith("mult = [[1, 1, 1], [1, 1, 1], [2, 2, 2]]")
    assert main(["tensor", str(corpus / "ex58_A.json"), str(corpus / "ex58_B.json")]) == 3


def test_error_and_usage_exit_codes(corpus, tmp_path, capsys):
    assert main(["search-elementary", str(tmp_path / "nope.json"), str(corpus / "ex58_B.json")]) == 3
    (tmp_path / "trunc.json").write_text('{"rows": "V", "cols"', encoding="utf-8")
    assert main(["trim", str(tmp_path / "trunc.json")]) == 3
    assert "ParseError" in capsys.readouterr().err
    assert main(["trim", str(corpus / "ex58_A.json")]) == 3
    for argv in (["bogus"], [], ["search-se", "a.json"], ["search-elementary", "a", "b", "--inner-dims", "3..1"],
                 ["search-se", "a", "b", "--lag", "2", "--max-lag", "3"], ["--threads", "0", "examples"]):
        with pytest.raises(SystemExit) as info:
            main(argv)
        assert info.value.code == 64


def test_global_flags_in_either_position(tmp_path):
    assert main(["--threads", "4", "--seed", "9", "examples", "-o", str(tmp_path / "a"), "--random", "2"]) == 0
    assert main(["examples", "--seed", "9", "--random", "2", "-o", str(tmp_path / "b")]) == 0
    for name in ("shift_0.json", "shift_1.json"):
        assert (tmp_path / "a" / name).read_text() == (tmp_path / "b" / name).read_text()


def test_module_entry_point(tmp_path):
    proc = subprocess.run([sys.executable, "-m", "shifteq", "examples", "-o", str(tmp_path)],
                          capture_output=True, text=True)
    assert proc.returncode == 0
    proc = subprocess.run([sys.executable, "-m", "shifteq", "search-elementary",
                           str(tmp_path / "ex58_B.json"), str(tmp_path / "ex58_C.json")],
                          capture_output=True, text=True)
    assert proc.returncode == 0 and proc.stdout.startswith("FOUND")
