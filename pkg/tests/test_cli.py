import json
import subprocess
import sys

import pytest

from solvsemi.cli import main
from solvsemi.documents import (DocumentError, element_ref, load_document,
                                parse_document, serialize_document)

EX32_DOC = """
{
  "shape": {"m": 1, "n": 1},
  "model": "multiplicative",
  "symbols": {},
  "sets": {
    "S": [
      {"a_mult": "1/3", "b": ["0"]},
      {"a_mult": "2", "b": ["2"]},
      {"a_mult": "2", "b": ["-2"]}
    ],
    "P": [
      {"a_mult": "2", "b": ["0"]},
      {"a_mult": "3", "b": ["1"]}
    ],
    "L": [
      {"a_mult": "1/2", "b": ["1"]},
      {"a_mult": "2", "b": ["1"]}
    ],
    "K": [
      {"a_mult": "2", "b": ["sqrt2"]},
      {"a_mult": "2", "b": ["1/2"]}
    ]
  },
  "options": {}
}
"""


@pytest.fixture
def doc_path(tmp_path):
    # declare sqrt2 for the K set
    text = EX32_DOC.replace('"symbols": {}',
                            '"symbols": {"sqrt2": 1.4142135623730951}')
    p = tmp_path / "doc.json"
    p.write_text(text)
    return str(p)


def test_parse_and_roundtrip(doc_path):
    doc = load_document(doc_path)
    assert set(doc.sets) == {"S", "P", "L", "K"}
    once = serialize_document(doc)
    twice = serialize_document(parse_document(once))
    assert once == twice


def test_parse_reports_line_numbers():
    with pytest.raises(DocumentError, match="line"):
        parse_document("{\n  broken\n}")


def test_parse_rejects_bad_scalar():
    bad = EX32_DOC.replace('"1/3"', '"1//3"')
    with pytest.raises(DocumentError, match=r"sets\.S\[0\]"):
        parse_document(bad)


def test_parse_rejects_model_mismatch():
    bad = EX32_DOC.replace('"a_mult": "1/3"', '"a": "1"')
    with pytest.raises(DocumentError, match="missing 'a_mult'"):
        parse_document(bad)


def test_element_ref(doc_path):
    doc = load_document(doc_path)
    el = element_ref(doc, "P[1]")
    assert el.a_mult.evaluate() == 3.0
    with pytest.raises(DocumentError):
        element_ref(doc, "P[9]")
    with pytest.raises(DocumentError):
        element_ref(doc, "nope")


def test_check_nonseparated_exit_code(doc_path, capsys):
    code = main(["check", doc_path, "--set", "S"])
    out = capsys.readouterr().out
    assert code == 0
    assert "nonseparated" in out


def test_check_separated_exit_code(doc_path, capsys):
    code = main(["check", doc_path, "--set", "P"])
    out = capsys.readouterr().out
    assert code == 2
    assert out.startswith("separated")
    assert "witness" in out


def test_check_structured_output(doc_path, capsys):
    code = main(["--format", "structured", "check", doc_path, "--set", "S"])
    blob = json.loads(capsys.readouterr().out)
    assert code == 0
    assert blob["schema"] == "solvsemi/1"
    assert blob["result"]["separated"] is False
    assert "hull_certificates" in blob["result"]


def test_check_malformed_document(tmp_path, capsys):
    p = tmp_path / "bad.json"
    p.write_text('{"shape": {"m": 1, "n": 1}, "sets": {"S": [{"a_mult": "1//2", "b": ["0"]}]}}')
    code = main(["check", str(p), "--set", "S"])
    assert code == 1
    assert "error" in capsys.readouterr().err


def test_check_missing_file(capsys):
    assert main(["check", "/does/not/exist.json", "--set", "S"]) == 1


def test_limit_command(doc_path, tmp_path, capsys):
    out_csv = tmp_path / "trace.csv"
    code = main(["limit", doc_path, "--z0", "L[0]", "--z", "L[1]",
                 "--set", "L", "--tol", "1e-6", "--out", str(out_csv)])
    out = capsys.readouterr().out
    assert code == 0
    assert "target: (3)" in out
    assert out_csv.exists()
    rows = out_csv.read_text().strip().splitlines()
    assert rows[0].startswith("t,")


def test_limit_rejects_wrong_signs(doc_path, capsys):
    code = main(["limit", doc_path, "--z0", "L[1]", "--z", "L[0]"])
    assert code == 1
    assert "a_mult < 1" in capsys.readouterr().err


def test_kronecker_command(doc_path, capsys):
    code = main(["kronecker", doc_path, "--set", "K", "--element", "0"])
    assert code == 0
    assert "dense: true" in capsys.readouterr().out
    code = main(["kronecker", doc_path, "--set", "K", "--element", "1"])
    assert code == 2
    assert "dense: false" in capsys.readouterr().out


def test_generators_command(capsys):
    code = main(["generators", "--group", "Gn", "--n", "2", "--mode", "semigroup"])
    out = capsys.readouterr().out
    assert code == 0
    assert "4 generators" in out
    assert "verified nonseparated" in out


def test_generators_structured_and_out(tmp_path, capsys):
    out_doc = tmp_path / "gens.json"
    code = main(["--format", "structured", "generators", "--group", "Hmn",
                 "--m", "2", "--n", "2", "--mode", "group", "--out", str(out_doc)])
    blob = json.loads(capsys.readouterr().out)
    assert code == 0
    assert blob["result"]["nonseparated"] is True
    assert blob["result"]["count"] == 3
    reparsed = load_document(out_doc)
    assert len(reparsed.sets["generators"]) == 3


def test_explore_command(doc_path, tmp_path, capsys):
    out_csv = tmp_path / "cloud.csv"
    code = main(["explore", doc_path, "--set", "S", "--max-length", "6",
                 "--witnesses", "--threshold", "10", "--out", str(out_csv)])
    out = capsys.readouterr().out
    assert code == 0
    assert "quadrant I" in out
    assert out_csv.exists()


def test_examples_command(capsys):
    code = main(["examples", "ex33", "--max-length", "6"])
    out = capsys.readouterr().out
    assert code == 0
    assert "nonseparated" in out
    assert "all pass" in out
    assert "excluded inverse fails predicate: True" in out


def test_examples_structured(capsys):
    code = main(["--format", "structured", "examples", "ex32", "--max-length", "5"])
    blob = json.loads(capsys.readouterr().out)
    assert code == 0
    assert blob["result"]["all_pass"] is True


def test_densify_euclidean_command(tmp_path, capsys):
    p = tmp_path / "vec.json"
    p.write_text(json.dumps({
        "shape": {"m": 1, "n": 1},
        "model": "multiplicative",
        "symbols": {},
        "sets": {"V": [{"a_mult": "1", "b": ["1"]}, {"a_mult": "1", "b": ["-1"]}]},
        "options": {},
    }))
    code = main(["densify", str(p), "--set", "V", "--kind", "euclidean",
                 "--epsilon", "1e-3"])
    out = capsys.readouterr().out
    assert code == 0
    assert "dense: True" in out


def test_densify_hmn_command(tmp_path, capsys):
    p = tmp_path / "tuple.json"
    p.write_text(json.dumps({
        "shape": {"m": 1, "n": 1},
        "model": "multiplicative",
        "symbols": {},
        "sets": {"T": [{"a_mult": "2", "b": ["0"]}, {"a_mult": "1/2", "b": ["0"]},
                       {"a_mult": "2", "b": ["1"]}, {"a_mult": "2", "b": ["-1"]}]},
        "options": {},
    }))
    code = main(["densify", str(p), "--set", "T", "--epsilon", "1e-2"])
    out = capsys.readouterr().out
    assert code == 0
    assert "certificate verified: True" in out


def test_console_script_runs():
    proc = subprocess.run([sys.executable, "-m", "solvsemi.cli", "--help"],
                          capture_output=True, text=True)
    assert proc.returncode == 0
    assert "separation" in proc.stdout
