from __future__ import annotations

import json
import subprocess
import sys

import pytest

from provac.cli import main
from provac.conditions import decide


@pytest.fixture
def case_files(fixtures_dir):
    return [str(fixtures_dir / n) for n in ("case_study.pgraph.json", "case_study.ppol", "case_study.request.json")]


def test_evaluate_case_study(case_files, capsys, tmp_path):
    trace = tmp_path / "trace.jsonl"
    assert main(["evaluate", *case_files, "--trace", str(trace)]) == 0
    out = json.loads(capsys.readouterr().out)
    assert out["outcome"] == "Permit" and out["combined"] == "1_P"
    assert out["applicable"] == ["resubmission"]
    lines = [json.loads(x) for x in trace.read_text().splitlines()]
    assert lines[-1] == {"outcome": "Permit"}
    assert any(r.get("node") == "c1" and r["decision"] == "⊥_P" for r in lines)


def test_evaluate_matches_library(case_files, capsys, case_graph, case_doc, case_request):
    main(["evaluate", *case_files])
    out = json.loads(capsys.readouterr().out)
    lib = decide(case_doc.policies, case_graph, case_request, aliases=case_doc.aliases)
    assert out["outcome"] == lib.outcome


def test_reports_identical_modulo_timing(case_files, capsys):
    outs = []
    for _ in range(2):
        main(["evaluate", *case_files])
        out = json.loads(capsys.readouterr().out)
        out.pop("timing_ms")
        outs.append(out)
    assert outs[0] == outs[1]


def test_empty_graph_denies(case_files, tmp_path, capsys):
    empty = tmp_path / "empty.pgraph.json"
    empty.write_text(json.dumps({"version": 1, "vertices": [], "edges": []}))
    assert main(["evaluate", str(empty), case_files[1], case_files[2]]) == 1
    out = json.loads(capsys.readouterr().out)
    assert out["outcome"] == "Deny" and out["policies"][0]["target"] == "×_T"


def test_malformed_request(case_files, tmp_path, capsys):
    bad = tmp_path / "bad.json"
    bad.write_text("{subject:")
    assert main(["evaluate", case_files[0], case_files[1], str(bad)]) == 2
    assert "malformed request JSON" in capsys.readouterr().err


def test_bad_combiner(case_files, capsys):
    assert main(["evaluate", *case_files, "--combiner", "nope"]) == 2


def test_alias_file(tmp_path, fixtures_dir, capsys):
    graph = tmp_path / "g.pgraph.json"
    graph.write_text(
        json.dumps(
            {
                "version": 1,
                "vertices": [{"id": "s", "type": "process", "name": "s1", "class": "wasSubmittedBy"}],
                "edges": [],
            }
        )
    )
    pol = tmp_path / "p.ppol"
    pol.write_text("policy p { target: process:Submit; condition: @1; }\n")
    req = fixtures_dir / "case_study.request.json"
    assert main(["evaluate", str(graph), str(pol), str(req)]) == 1
    aliases = tmp_path / "aliases.json"
    aliases.write_text(json.dumps({"Submit": ["wasSubmittedBy"]}))
    capsys.readouterr()
    assert main(["evaluate", str(graph), str(pol), str(req), "--alias", str(aliases)]) == 0


def test_validate_ok(case_files, capsys):
    assert main(["validate", *case_files]) == 0


def test_validate_reports_problems(tmp_path, capsys):
    graph = tmp_path / "bad.pgraph.json"
    graph.write_text(
        json.dumps(
            {
                "version": 1,
                "vertices": [{"id": "a", "type": "agent", "name": "a"}, {"id": "d", "type": "artifact", "name": "d"}],
                "edges": [{"from": "d", "to": "a", "label": "u"}],
            }
        )
    )
    pol = tmp_path / "bad.ppol"
    pol.write_text("policy p { condition: c1; }\n")
    assert main(["validate", str(graph), str(pol)]) == 2
    out = capsys.readouterr().out
    assert "triple not in E" in out and "unresolved reference 'c1'" in out


def test_tables(capsys):
    assert main(["tables", "sqcup"]) == 0
    out = capsys.readouterr().out
    rows = [line for line in out.splitlines() if "|" in line][1:]
    assert [r.split("|")[1].split() for r in rows] == [
        ["1", "1", "1", "1"],
        ["1", "0", "0", "0"],
        ["1", "0", "⊥", "⊥"],
        ["1", "0", "⊥", "×"],
    ]
    assert main(["tables"]) == 0
    assert "dbd" in capsys.readouterr().out
    assert main(["tables", "nope"]) == 2


def test_verify_and_consistency(capsys):
    assert main(["verify"]) == 0
    assert "[PASS] closure: unary clone of {not}" in capsys.readouterr().out
    assert main(["consistency-report", "--json"]) == 0
    assert json.loads(capsys.readouterr().out)


def test_module_entry_point(case_files):
    proc = subprocess.run([sys.executable, "-m", "provac", "evaluate", *case_files], capture_output=True, text=True)
    assert proc.returncode == 0 and '"outcome": "Permit"' in proc.stdout
