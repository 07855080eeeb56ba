"""Acceptance gate: one printed pass/fail line per criterion.

Tolerances are fixed here: exact decision matches everywhere, the case study
under 1 s, the closure under 10 s, at least 50 graphs x 20 patterns for the
matcher, and 500 randomized documents and graphs for the round-trips.
"""

from __future__ import annotations

import itertools
import json
import random
import time

from gen import random_document, random_graph_doc, random_pattern
from provac.algebra import check_equivalence
from provac.cli import main
from provac.conditions import Policy, decide, finalize, transform
from provac.dsl import parse, serialize
from provac.expr import Atom, Binary, Const, Ref, Uary, Unary
from provac.graph import ProvenanceGraph, VertexType, dump_graph, dumps_graph, load_graph
from provac.lattice.closure import jobe_sanity_check, unary_clone_closure
from provac.lattice.tables import POLICY_COMBINATORS, TARGET_BINARY_OPS, UNARY_OPS, apply_binary, apply_unary
from provac.lattice.values import CANONICAL, Decision4, P, Space, T
from provac.report import consistency_report
from provac.targets import NullTarget, PathPattern, PathTarget, Quaternion, Request, match_path, match_path_oracle

CASE_SECONDS = 1.0
CLOSURE_SECONDS = 10.0
MIN_GRAPHS, MIN_PATTERNS, MAX_VERTICES = 50, 20, 12
RANDOM_ROUND_TRIPS, MAX_AST_DEPTH = 500, 6
SYM = {"1": "1", "0": "0", "⊥": "B", "×": "X"}


def test_case_study_reproduction(case_graph, case_doc, case_request, fixtures_dir, capsys, acceptance_line):
    start = time.perf_counter()
    d = decide(case_doc.policies, case_graph, case_request, aliases=case_doc.aliases)
    elapsed = time.perf_counter() - start
    got = {n: d.trace.find(n).decision for n in ("t1", "t2", "target", "c1", "condition")}
    want = {"t1": "1_T", "t2": "0_T", "target": "1_T", "c1": "⊥_P", "condition": "1_P"}
    files = [str(fixtures_dir / n) for n in ("case_study.pgraph.json", "case_study.ppol", "case_study.request.json")]
    exit_code = main(["evaluate", *files])
    cli = json.loads(capsys.readouterr().out)["outcome"]
    ok = got == want and d.outcome == "Permit" and cli == "Permit" and exit_code == 0 and elapsed < CASE_SECONDS
    acceptance_line(
        "1 case study",
        ok,
        f"t1={got['t1']} t2={got['t2']} t1⊔t2={got['target']} c1={got['c1']} root={got['condition']} "
        f"CLI={cli} in {elapsed * 1000:.1f} ms",
    )
    assert ok


def test_truth_table_fidelity(fixtures_dir, acceptance_line):
    golden = json.loads((fixtures_dir / "golden_tables.json").read_text(encoding="utf-8"))["tables"]
    checked = mismatched = 0

    def cell(grid, i, j=0):
        return Decision4.parse(SYM[grid[i].split()[j]] + "T").value

    for op in UNARY_OPS:
        for i, x in enumerate(CANONICAL):
            checked += 1
            mismatched += apply_unary(op, Decision4(x)).value != cell(golden[op], i)
    for op in TARGET_BINARY_OPS + POLICY_COMBINATORS:
        space = Space.POLICY if op in POLICY_COMBINATORS else Space.TARGET
        for (i, a), (j, b) in itertools.product(enumerate(CANONICAL), repeat=2):
            checked += 1
            got = apply_binary(op, Decision4(a, space), Decision4(b, space)).value
            mismatched += got != cell(golden[op], i, j)
    for direction in ("fwd", "rev"):
        for (i, x), (j, tag) in itertools.product(enumerate(CANONICAL), repeat=2):
            checked += 1
            mismatched += transform(Decision4(x), direction, tag).value != cell(golden[direction], i, j)
    for mode in ("pbd", "dbd"):
        for i, x in enumerate(CANONICAL):
            checked += 1
            mismatched += finalize(Decision4(x, Space.POLICY), mode).value != cell(golden[mode], i)
    ok = mismatched == 0 and checked == 3 * 4 + 15 * 16 + 2 * 16 + 2 * 4
    acceptance_line("2 truth tables", ok, f"{checked - mismatched}/{checked} cells match the golden tables")
    assert ok


def test_equivalence_suite(acceptance_line):
    t, u, v = Ref("t"), Ref("t2"), Ref("t3")
    folds = [
        check_equivalence(Uary("any", (t, u, v)), Binary("sqcup", Binary("sqcup", t, u), v)),
        check_equivalence(Uary("all", (t, u, v)), Binary("sqcap", Binary("sqcap", t, u), v)),
    ]
    double_not = check_equivalence(Unary("not", Unary("not", t)), t)
    morgans = [
        check_equivalence(Unary("not", Binary("sqcup", t, u)), Binary("sqcap", Unary("not", t), Unary("not", u))),
        check_equivalence(Unary("not", Binary("sqcap", t, u)), Binary("sqcup", Unary("not", t), Unary("not", u))),
    ]
    opt_opt = next(i for i in consistency_report() if i.label == "opt(opt t) = opt t")
    ok = (
        all(r.equivalent and r.cases == 64 for r in folds)
        and double_not.equivalent
        and double_not.agreeing == 4
        and all(not r.equivalent and r.cases == 16 and r.counterexample for r in morgans)
        and opt_opt.data["equivalent"] is False
    )
    acceptance_line(
        "3 equivalences",
        ok,
        f"folds {folds[0].agreeing}/64 and {folds[1].agreeing}/64; not-not {double_not.agreeing}/4; "
        f"De Morgan counterexamples {morgans[0]} | {morgans[1]}; opt(opt t) verdict recorded: {opt_opt.detail}",
    )
    assert ok


def test_functional_completeness_evidence(acceptance_line):
    start = time.perf_counter()
    closure = unary_clone_closure(["not", "opt", "star", "cup"])
    elapsed = time.perf_counter() - start
    jobe = jobe_sanity_check()
    only_not = unary_clone_closure(["not"])
    not_ext = tuple(apply_unary("not", Decision4(x)).value for x in CANONICAL)
    expected_not = {tuple(range(4)), tuple(CANONICAL.index(x) for x in not_ext)}
    ok = closure.saturated and elapsed < CLOSURE_SECONDS and set(only_not) == expected_not
    ok = ok and all(closure.witnesses.values()) and jobe.closure_size == 27
    acceptance_line(
        "4 functional completeness",
        ok,
        f"closure of {{¬,~,★,∪}} = {len(closure)}/256 in {elapsed:.2f} s with witnesses; "
        f"Jobe {{•,E1,E2}} reaches {jobe.closure_size}/27; {{¬}} gives {len(only_not)} functions",
    )
    assert ok


def test_path_matcher_oracle(acceptance_line):
    rng = random.Random(20180430)
    req = Request("alice0", attributes={"day": "Monday"})
    graphs = compared = disagreements = 0
    seen = set()
    while graphs < MIN_GRAPHS:
        g = load_graph(random_graph_doc(rng, MAX_VERTICES))
        graphs += 1
        for _ in range(MIN_PATTERNS):
            pattern = random_pattern(rng)
            fast, slow = match_path(pattern, g, req).decision, match_path_oracle(pattern, g, req)
            compared += 1
            disagreements += fast != slow
            seen.add(slow.value)
    ok = disagreements == 0 and graphs >= MIN_GRAPHS and compared >= MIN_GRAPHS * MIN_PATTERNS and len(seen) == 4
    acceptance_line(
        "5 matcher oracle",
        ok,
        f"{compared - disagreements}/{compared} decisions agree over {graphs} DAGs (≤{MAX_VERTICES} vertices); "
        f"{len(seen)} distinct outcomes exercised",
    )
    assert ok


def test_round_trips(case_graph, case_doc, acceptance_line):
    failures = []
    if load_graph(dumps_graph(case_graph)) != case_graph:
        failures.append("case-study graph")
    if parse(serialize(case_doc)) != case_doc:
        failures.append("case-study policy")
    rng = random.Random(7)
    for n in range(RANDOM_ROUND_TRIPS):
        doc = random_document(rng, MAX_AST_DEPTH)
        if parse(serialize(doc)) != doc:
            failures.append(f"document {n}")
        g = load_graph(random_graph_doc(rng, MAX_VERTICES))
        if load_graph(dump_graph(g)) != g:
            failures.append(f"graph {n}")
    ok = not failures
    acceptance_line(
        "6 round-trips",
        ok,
        f"fixtures plus {RANDOM_ROUND_TRIPS} random documents (depth ≤ {MAX_AST_DEPTH}) and "
        f"{RANDOM_ROUND_TRIPS} random graphs; failures: {failures[:3] or 'none'}",
    )
    assert ok


def test_gate_semantics(case_graph, case_doc, acceptance_line):
    null = Atom(NullTarget())
    bob = Atom(PathTarget(PathPattern((Quaternion(VertexType.AGENT, "Bob"),))))
    # a condition that would raise if it were ever evaluated
    poison = Const(T("1"))
    base = case_doc.policies[0]
    cases = [
        ("0_T", Unary("not", null), case_graph, ()),
        ("⊥_T", Unary("opt", Unary("not", null)), case_graph, ()),
        ("×_T", bob, ProvenanceGraph(), ()),
        ("0_T", Ref("t2"), case_graph, base.target_decls),
    ]
    results = []
    for expected, target, g, decls in cases:
        d = decide([Policy("gate", target, poison, "none", decls)], g)
        r = d.results[0]
        results.append(
            str(r.target) == expected and not r.applicable and not d.trace.section("condition") and d.outcome == "Deny"
        )
    open_gate = decide([Policy("open", null, Const(P("1")))], case_graph)
    ok = all(results) and bool(open_gate.trace.section("condition"))
    acceptance_line(
        "7 gate",
        ok,
        f"{sum(results)}/{len(results)} non-1 targets left the condition section unevaluated; a 1_T target evaluates it",
    )
    assert ok
