from __future__ import annotations

import json
import subprocess
import sys
from pathlib import Path

import pytest

from mbqcorder import cli, flow
from mbqcorder.exceptions import IndexOutOfRange, MixedSource, PatternSyntaxError, WrongStabCount
from mbqcorder.gf2 import BitMatrix
from mbqcorder.stabilizer import graph_state

PATTERNS = Path(__file__).resolve().parent.parent / "patterns"


def run(capsys, *argv):
    code = cli.main([str(a) for a in argv])
    out = capsys.readouterr()
    return code, out.out, out.err


def write(tmp_path, text, name="p.pat"):
    path = tmp_path / name
    path.write_text(text)
    return path


# -- parsing -----------------------------------------------------------------


def test_parse_cluster():
    pat = cli.parse(PATTERNS / "cluster3.pat")
    assert pat.n == 3 and pat.edges == ((1, 2), (2, 3))
    assert pat.generator_matrix() == graph_state([(1, 2), (2, 3)], 3)
    assert (pat.declared_igauge, pat.declared_ocomp) == ((1,), (3,))


def test_parse_single_and_defaults():
    pat = cli.parse_text("qubits 1\nstab X\n")
    assert pat.words == ("X",) and pat.angles == (0.0,)
    assert pat.declared_igauge is None


def test_parse_planes_angles_and_empty_sets():
    pat = cli.parse_text("qubits 2\nedge 1 2  # comment\nplane 2 Y Z\nangle 1 -0.5\nigauge\nocomp\n")
    assert str(pat.planes[1]) == "[Y,Z]" and pat.angles == (-0.5, 0.0)
    assert pat.declared_igauge == () and pat.declared_ocomp == ()


@pytest.mark.parametrize(
    "text, exc, line",
    [
        ("qubits 2\nedge 1 2\nstab XX\nstab ZZ\n", MixedSource, 3),
        ("qubits 2\nedge 1 3\n", IndexOutOfRange, 2),
        ("qubits 2\nstab XX\n", WrongStabCount, 2),
        ("qubits 2\nfoo 1\n", PatternSyntaxError, 2),
        ("qubits 1\nangle 1 2.0\n", PatternSyntaxError, 2),
        ("qubits 1\nplane 1 X X\n", PatternSyntaxError, 2),
        ("edge 1 2\n", PatternSyntaxError, None),
    ],
)
def test_parse_errors(text, exc, line):
    with pytest.raises(exc) as info:
        cli.parse_text(text)
    assert info.value.line == line


# -- commands ------------------------------------------------------------------


def test_analyze_cluster(capsys):
    code, out, _ = run(capsys, "analyze", PATTERNS / "cluster3.pat", "--igauge", "1", "--ocomp", "3")
    assert code == 0
    assert "T:\n  000\n  100\n  010\n" in out
    assert "classification: strict-partial-order" in out


def test_analyze_json_round_trip(capsys):
    code, out, _ = run(capsys, "analyze", PATTERNS / "cluster3.pat", "--json")
    doc = json.loads(out)
    mats = [BitMatrix([[int(c) for c in row] for row in doc[k]], len(doc[k][0])) for k in "THZR"]
    g = flow.reconstruct(*mats)
    assert g.same_group(graph_state([(1, 2), (2, 3)], 3))
    assert doc["fc"] == {"1": [2], "2": [3], "3": []}


def test_analyze_ghz(capsys):
    code, out, _ = run(capsys, "analyze", PATTERNS / "ghz3.pat", "--json")
    doc = json.loads(out)
    assert code == 0
    assert doc["T"] == ["000"] * 3
    assert doc["I"] == doc["O"] == [1, 2, 3]
    assert doc["igauge_equals_I"] is False and doc["ocomp_equals_O"] is False


def test_analyze_ctc_exit_codes(capsys):
    code, out, _ = run(capsys, "analyze", PATTERNS / "edge_ctc.pat", "--json")
    doc = json.loads(out)
    assert code == 0 and doc["classification"] == "ctc" and doc["cycles"] == [[1, 2]]
    code, _, _ = run(capsys, "analyze", PATTERNS / "edge_ctc.pat", "--require-order")
    assert code == 3


def test_invalid_pair_exit_code(capsys):
    code, _, err = run(capsys, "analyze", PATTERNS / "cluster3.pat", "--igauge", "1", "--ocomp", "2")
    assert code == 2 and "error" in err


def test_non_extremal_declaration_warns(capsys, tmp_path):
    path = write(tmp_path, "qubits 3\nstab ZIZ\nstab IZZ\nstab XXX\nigauge 1 2\nocomp 1 2 3\n")
    code, out, err = run(capsys, "analyze", path, "--json")
    assert code == 0 and "warning" in err
    doc = json.loads(out)
    assert (doc["igauge"], doc["ocomp"]) == ([1], [3])
    assert doc["T"] == ["000"] * 3


def test_non_extremal_declaration_rejected(capsys, tmp_path):
    # With I = {1}, O = {1, 3} qubit 2 can be gauged individually.
    path = write(tmp_path, "qubits 3\nedge 1 2\nedge 2 3\nigauge 1\nocomp 1 3\n")
    code, _, err = run(capsys, "analyze", path)
    assert code == 2 and "qubit 2" in err
    path = write(tmp_path, "qubits 3\nstab ZIZ\nstab IZZ\nstab XXX\nigauge 1 2 3\nocomp 1 2 3\n", "g.pat")
    code, _, err = run(capsys, "analyze", path)
    assert code == 2 and "dependent" in err


def test_parse_error_exit_code(capsys, tmp_path):
    code, _, err = run(capsys, "analyze", write(tmp_path, "qubits 2\nedge 1 2\nstab XX\nstab ZZ\n"))
    assert code == 1 and "line 3" in err
    code, _, _ = run(capsys, "analyze", tmp_path / "missing.pat")
    assert code == 1


def test_simulator_guard_exit_code(capsys, tmp_path):
    path = write(tmp_path, "qubits 15\n")
    code, _, _ = run(capsys, "simulate", path)
    assert code == 4


def test_enumerate(capsys):
    code, out, _ = run(capsys, "enumerate", PATTERNS / "cluster3.pat", "--json")
    doc = json.loads(out)
    assert doc["count"] == 9
    pairs = [(r["igauge"], r["ocomp"]) for r in doc["relations"]]
    assert pairs == sorted(pairs)
    code, out, _ = run(capsys, "enumerate", PATTERNS / "single_x.pat")
    assert "count: 1" in out


def test_flip_lc_orbit(capsys):
    code, out, _ = run(capsys, "flip", PATTERNS / "cluster3.pat", "--qubit", "2", "--json")
    doc = json.loads(out)
    assert doc["T"] == ["000", "100", "110"] and doc["rederived_match"] is True
    assert doc["planes"][1] == "[Y,X]"
    code, out, _ = run(capsys, "lc", PATTERNS / "cluster3.pat", "--qubit", "2", "--json")
    assert json.loads(out)["replanted"] == []
    code, out, _ = run(capsys, "orbit", PATTERNS / "cluster3.pat", "--json")
    doc = json.loads(out)
    assert doc["size"] == 2 and doc["generators"]["2"] == [1, 0]
    code, _, _ = run(capsys, "flip", PATTERNS / "cluster3.pat", "--qubit", "7")
    assert code == 2


def test_remove_ctc(capsys):
    code, out, _ = run(capsys, "remove-ctc", PATTERNS / "edge_ctc.pat", "--json")
    doc = json.loads(out)
    assert code == 0
    assert [s["kind"] for s in doc["steps"]] == ["cycle"]
    assert doc["steps"][0]["flag"] == "o2 = s2"
    code, out, _ = run(capsys, "remove-ctc", PATTERNS / "union_ctc.pat", "--json")
    assert len(json.loads(out)["steps"]) == 2


def test_simulate(capsys):
    code, out, _ = run(capsys, "simulate", PATTERNS / "cluster3.pat", "--compare-gauges")
    assert code == 0 and "gauge-independent: true" in out
    code, out, _ = run(capsys, "simulate", PATTERNS / "cluster3.pat", "--gauge", "1", "--postselect", "0=0", "--json")
    assert json.loads(out)["success_probability"] == 1.0
    code, _, _ = run(capsys, "simulate", PATTERNS / "edge_ctc.pat")
    assert code == 3


def test_export_dot(capsys):
    code, out, _ = run(capsys, "export-dot", PATTERNS / "cluster3.pat")
    assert out == (
        "digraph influence {\n  1 [shape=box];\n  2;\n  3 [shape=doublecircle];\n"
        "  1 -> 2;\n  2 -> 3;\n}\n"
    )
    code, out, _ = run(capsys, "export-dot", PATTERNS / "y_selfloop.pat")
    assert "1 -> 1;" in out


@pytest.mark.parametrize("command", ["analyze", "enumerate", "orbit", "remove-ctc", "simulate", "export-dot"])
def test_byte_stable(command):
    argv = [sys.executable, "-m", "mbqcorder", command, str(PATTERNS / "cluster3.pat")]
    first = subprocess.run(argv, capture_output=True, check=True).stdout
    second = subprocess.run(argv, capture_output=True, check=True).stdout
    assert first == second and first
