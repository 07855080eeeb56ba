from __future__ import annotations

import random
from datetime import date
from decimal import Decimal

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from gen import random_graph, random_pattern
from provac.attributes import Predicate
from provac.errors import RequestParseError
from provac.graph import AliasTable, ProvenanceGraph, Vertex, VertexType, load_graph
from provac.lattice.values import T, Value
from provac.targets import (
    Exactly,
    NullTarget,
    PathPattern,
    PathTarget,
    Plus,
    Quaternion,
    Request,
    RequestTarget,
    SingleTarget,
    eval_atomic_target,
    eval_quaternion,
    evaluate_atomic,
    match_path,
    match_path_oracle,
)

AG, AR, PR = VertexType.AGENT, VertexType.ARTIFACT, VertexType.PROCESS
EMPTY = ProvenanceGraph()


def vertex(vtype, cls, **attrs):
    return Vertex("v", vtype, cls.lower(), cls, attrs)


def chain(*classes, label="wtb"):
    vertices = [{"id": c, "type": "process", "name": c, "class": c} for c in classes]
    edges = [{"from": a, "to": b, "label": label} for a, b in zip(classes, classes[1:])]
    return load_graph({"version": 1, "vertices": vertices, "edges": edges})


def q(vtype, name, key=None, value=None, **kw):
    return Quaternion(vtype, name, key, value, **kw)


# -- single vertices ----------------------------------------------------------

FEMALE = q(AG, "User", "sex", "Female")
BEFORE_2016 = q(PR, "Submit", "date", date(2016, 1, 1), pred=Predicate.LT)


def test_full_quaternion_match():
    assert eval_quaternion(FEMALE, vertex(AG, "User", sex="Female")) == T("1")
    assert eval_quaternion(BEFORE_2016, vertex(PR, "Submit", date=date(2015, 6, 1))) == T("1")


def test_value_failure_gives_bot():
    assert eval_quaternion(BEFORE_2016, vertex(PR, "Submit", date=date(2017, 6, 1))) == T("B")


def test_missing_attribute_is_a_value_failure():
    assert eval_quaternion(FEMALE, vertex(AG, "User")) == T("B")


def test_type_only_gives_zero():
    assert eval_quaternion(FEMALE, vertex(AG, "Professor", sex="Female")) == T("0")


def test_wrong_type_gives_cross():
    assert eval_quaternion(FEMALE, vertex(PR, "User", sex="Female")) == T("X")


def test_pair_targets_never_give_zero():
    pair = q(AG, "User")
    assert eval_quaternion(pair, vertex(AG, "User")) == T("1")
    assert eval_quaternion(pair, vertex(AG, "Professor")) == T("B")
    assert eval_quaternion(pair, vertex(PR, "User")) == T("X")


def test_names_are_case_insensitive_and_aliased():
    v = Vertex("v", PR, "wasSubmittedBy", "wasSubmittedBy")
    assert eval_quaternion(q(PR, "submit"), v) == T("B")
    aliases = AliasTable.from_mapping({"Submit": "wasSubmittedBy"})
    assert eval_quaternion(q(PR, "submit"), v, aliases=aliases) == T("1")


def test_request_binding():
    target = q(AG, "User", "id", binding="subject")
    v = Vertex("alice", AG, "alice", "User")
    assert eval_quaternion(target, v, Request("alice")) == T("1")
    assert eval_quaternion(target, v, Request("bob")) == T("B")
    notes: list[str] = []
    assert eval_quaternion(q(AG, "User", "id", binding="team"), v, Request("alice"), notes=notes) == T("B")
    assert notes == ["request binding $team is missing"]


def test_quaternion_invariants():
    with pytest.raises(ValueError):
        Quaternion(AG, "User", None, "x")
    with pytest.raises(ValueError):
        Quaternion(AG, "User", "k", "x", binding="y")
    with pytest.raises(ValueError):
        Exactly(0)
    with pytest.raises(ValueError):
        PathPattern((Plus(), q(AG, "User")))


def test_single_takes_best_vertex(case_graph):
    assert eval_atomic_target(SingleTarget(q(PR, "Review", "day", "Monday")), case_graph) == T("1")
    # the Review vertex scores ⊥ but other processes score 0, and 0 ranks above ⊥
    assert eval_atomic_target(SingleTarget(q(PR, "Review", "day", "Friday")), case_graph) == T("0")
    only_review = ProvenanceGraph([case_graph.vertices["review1"]])
    assert eval_atomic_target(SingleTarget(q(PR, "Review", "day", "Friday")), only_review) == T("B")
    assert eval_atomic_target(SingleTarget(q(AG, "Robot", "day", "Friday")), case_graph) == T("0")


# -- null, request and empty graphs ----------------------------------------------


def test_null_always_matches(case_graph):
    assert eval_atomic_target(NullTarget(), case_graph) == T("1")
    assert eval_atomic_target(NullTarget(), EMPTY) == T("1")


@pytest.mark.parametrize(
    "target",
    [SingleTarget(q(AG, "User")), PathTarget(PathPattern((q(AG, "User"),)))],
)
def test_empty_graph_gives_cross(target):
    assert eval_atomic_target(target, EMPTY) == T("X")


def test_request_target_ignores_graph():
    req = Request("alice", attributes={"role": "student", "level": Decimal(3)})
    assert eval_atomic_target(RequestTarget("role", "student"), EMPTY, req) == T("1")
    assert eval_atomic_target(RequestTarget("role", "staff"), EMPTY, req) == T("X")
    assert eval_atomic_target(RequestTarget("level", Decimal(2), Predicate.GT), EMPTY, req) == T("1")
    missing = evaluate_atomic(RequestTarget("team", "x"), EMPTY, req)
    assert missing.decision == T("X") and missing.notes


def test_request_from_json():
    req = Request.from_json({"subject": "a", "attributes": {"when": "2018-01-02", "n": 4}})
    assert req.lookup("when") == date(2018, 1, 2)
    assert req.lookup("subject") == "a"
    assert req.lookup("nothing") is None
    for bad in ([], {"attributes": {}}, {"subject": ""}, {"subject": "a", "attributes": {"x": None}}):
        with pytest.raises(RequestParseError):
            Request.from_json(bad)


# -- paths ----------------------------------------------------------------------


def p(*elements, reverse=False):
    return PathPattern(tuple(elements), reverse)


def test_chain_examples():
    g = chain("A", "B", "C")
    a, c = q(PR, "A"), q(PR, "C")
    for pattern, expected in [
        (p(a), "1"),
        (p(a, Plus(), c), "1"),
        (p(a, Exactly(1), c), "1"),
        (p(a, Exactly(2), c), "X"),
        (p(c, Plus(), a), "B"),  # every vertex is a process
        (p(c, Plus(), a, reverse=True), "1"),
    ]:
        assert match_path(pattern, g).decision == T(expected), pattern
        assert match_path_oracle(pattern, g) == T(expected), pattern


def test_path_grades():
    g = load_graph(
        {
            "version": 1,
            "vertices": [
                {"id": "s", "type": "process", "name": "s", "class": "Submit", "attributes": {"day": "Monday"}},
                {"id": "d", "type": "artifact", "name": "d", "class": "Data"},
            ],
            "edges": [{"from": "s", "to": "d", "label": "u"}],
        }
    )
    assert match_path(p(q(PR, "Submit", "day", "Monday"), q(AR, "Data")), g).decision == T("1")
    assert match_path(p(q(PR, "Submit", "day", "Friday"), q(AR, "Data")), g).decision == T("0")
    assert match_path(p(q(PR, "Review"), q(AR, "Data")), g).decision == T("B")
    assert match_path(p(q(AG, "User"), q(AR, "Data")), g).decision == T("X")


def test_case_study_atomic_targets(case_graph, case_doc):
    policy = case_doc.policies[0]
    decls = dict(policy.target_decls)
    t1_upload, t1_submit = decls["t1"].left.target, decls["t1"].right.target
    assert eval_atomic_target(t1_upload, case_graph) == T("1")
    assert eval_atomic_target(t1_submit, case_graph) == T("1")
    assert eval_atomic_target(decls["t2"].target, case_graph) == T("0")


def test_matcher_reports_vertices(case_graph):
    pattern = p(q(AG, "Bob"), q(PR, "Upload"), reverse=True)
    m = match_path(pattern, case_graph)
    assert m.vertices == ("Bob", "upload1")


@settings(max_examples=150, deadline=None)
@given(st.integers(0, 10**9), st.integers(0, 10**9))
def test_matcher_agrees_with_oracle(graph_seed, pattern_seed):
    g = random_graph(random.Random(graph_seed))
    pattern = random_pattern(random.Random(pattern_seed))
    req = Request("alice0", attributes={"day": "Monday"})
    assert match_path(pattern, g, req).decision == match_path_oracle(pattern, g, req)


@settings(max_examples=60, deadline=None)
@given(st.integers(0, 10**9))
def test_single_target_is_monotone(seed):
    rng = random.Random(seed)
    g = random_graph(rng, 8)
    target = SingleTarget(q(AG, "User"))
    before = eval_atomic_target(target, g).value
    extra = ProvenanceGraph([*g.vertices.values(), Vertex("zz", PR, "zz", "Review")], g.edges)
    assert eval_atomic_target(target, extra).value >= before


def test_evaluation_is_repeatable(case_graph):
    target = PathTarget(p(q(PR, "Review"), Plus(), q(PR, "Revise"), reverse=True))
    assert {eval_atomic_target(target, case_graph) for _ in range(3)} == {T("1")}


def test_request_results_are_two_valued():
    values = {
        eval_atomic_target(RequestTarget("x", Decimal(n), pred), EMPTY, Request("s", attributes={"x": Decimal(1)})).value
        for n in range(3)
        for pred in Predicate
    }
    assert values == {Value.ONE, Value.CROSS}
