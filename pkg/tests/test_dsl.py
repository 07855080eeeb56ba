from __future__ import annotations

import random
from datetime import date
from decimal import Decimal

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from gen import random_document
from provac.attributes import Predicate
from provac.dsl import PolicyDocument, parse, parse_expression, serialize
from provac.dsl.lexer import tokenize
from provac.errors import PolicyDefinitionError, PolicySyntaxError
from provac.expr import Atom, Binary, Const, Ref, Transform, Uary, Unary
from provac.graph import VertexType
from provac.lattice.values import P, Space, Value
from provac.targets import Exactly, PathTarget, Plus, Quaternion, RequestTarget, SingleTarget


def wrap(body: str) -> str:
    return f"policy p {{\n{body}\n}}\n"


def test_any_of_two_paths():
    e = parse_expression("any[ path(agent:Bob, process:Upload), path(agent:Alice, process:Submit) ]")
    assert isinstance(e, Uary) and e.op == "any" and len(e.children) == 2
    assert all(isinstance(c, Atom) and isinstance(c.target, PathTarget) for c in e.children)


def test_transformation_declaration():
    doc = parse(wrap("target t4 = null;\nt4 fwd(0) -> p1;\ncondition: p1;"))
    (name, body), = doc.policies[0].condition_decls
    assert name == "p1" and body == Transform(Ref("t4"), "fwd", Value.ZERO)


def test_prefixed_transformation():
    doc = parse(wrap("target t = null;\nopt not t rev(B) -> p;\ncondition: p;"))
    assert doc.policies[0].condition_decls[0][1].prefix == ("opt", "not")


def test_precedence():
    e = parse_expression("not a sqcup b cap c")
    assert e == Binary("cap", Binary("sqcup", Unary("not", Ref("a")), Ref("b")), Ref("c"))
    assert parse_expression("a sqcup (b cap c)") == Binary("sqcup", Ref("a"), Binary("cap", Ref("b"), Ref("c")))
    assert parse_expression("not (a sqcup b)") == Unary("not", Binary("sqcup", Ref("a"), Ref("b")))


def test_atomic_forms():
    e = parse_expression('agent:User[sex:"Female"]')
    assert e == Atom(SingleTarget(Quaternion(VertexType.AGENT, "User", "sex", "Female")))
    e = parse_expression("process:Submit[date < 2016-01-01]")
    assert e.target.quaternion.value == date(2016, 1, 1) and e.target.quaternion.pred is Predicate.LT
    e = parse_expression("agent:User[id = $subject]")
    assert e.target.quaternion.binding == "subject"
    e = parse_expression('request[$role = "student"]')
    assert e == Atom(RequestTarget("role", "student"))
    e = parse_expression("request[$level >= 2.5]")
    assert e.target.value == Decimal("2.5")
    e = parse_expression("path(process:A, \\v+, process:B, \\v{2}, process:C, causal: reverse)")
    assert e.target.pattern.elements[1] == Plus() and e.target.pattern.elements[3] == Exactly(2)
    assert e.target.pattern.reverse


def test_constants_only_in_conditions():
    assert parse_expression("@B", Space.POLICY) == Const(P("B"))
    with pytest.raises(PolicySyntaxError, match="only allowed in conditions"):
        parse_expression("@1")


def test_case_study_round_trip(case_doc, fixtures_dir):
    text = serialize(case_doc)
    assert parse(text) == case_doc
    assert serialize(parse(text)) == text


def test_empty_document():
    assert serialize(parse("")) == "version: 1;\n"
    assert parse("version: 1;") == PolicyDocument()


@pytest.mark.parametrize(
    "text,message,line,column",
    [
        (wrap("condition: c1 cap c2;"), "unresolved reference 'c1'", 2, 12),
        (wrap("target: a AND b;\ncondition: @1;"), "unknown operator 'AND'", 2, 11),
        (wrap("target: null oplus_cup null;\ncondition: @1;"), "only defined for conditions", 2, 14),
        (wrap("target: null;"), "no 'condition:' section", 1, 1),
        (wrap("target t = null;\ntarget t = null;\ncondition: @1;"), "already declared", 3, 8),
        (wrap("target path = null;\ncondition: @1;"), "reserved word", 2, 8),
        (wrap("condition a = b;\ncondition b = a;\ncondition: a;"), "refers to itself", 3, 15),
        (wrap("target t = null;\ncondition: t;"), "'t' is a target, not a condition", 3, 12),
        (wrap("condition: @1;\nfinalize: sometimes;"), "unknown finalizer", 3, 11),
        ("version: 2;", "unsupported policy language version", 1, 10),
        ("policy p { condition: @1; }\npolicy p { condition: @1; }", "duplicate policy id", 2, 1),
        (wrap("condition: path(agent:A, causal: sideways);"), "unknown causal direction", 2, 34),
        (wrap("condition: @1"), "expected an operator or ';'", 3, 1),
        (wrap("condition: a ? b;"), "unexpected character", 2, 14),
        (wrap("t fwd(2) -> p;\ncondition: p;"), "expected a tag", 2, 7),
        (wrap("target t = null;\nnot not not not not t fwd(1) -> p;\ncondition: p;"), "depth 4", 3, 21),
    ],
)
def test_diagnostics(text, message, line, column):
    with pytest.raises(PolicySyntaxError) as err:
        parse(text)
    assert message in err.value.message
    assert (err.value.line, err.value.column) == (line, column)


def test_first_unresolved_reference_wins():
    text = wrap("condition x = zz;\ncondition: yy cap x;")
    with pytest.raises(PolicyDefinitionError) as err:
        parse(text)
    assert "'zz'" in str(err.value) and err.value.line == 2


def test_diagnostics_are_deterministic():
    text = wrap("condition: a cap b;")
    messages = set()
    for _ in range(3):
        with pytest.raises(PolicySyntaxError) as err:
            parse(text)
        messages.add(str(err.value))
    assert len(messages) == 1


def test_aliases_and_id():
    doc = parse('id: "demo";\nalias Submit = "wasSubmittedBy", "submit*";\n')
    assert doc.id == "demo"
    assert doc.aliases.entries == {"Submit": ("wasSubmittedBy", "submit*")}
    assert parse(serialize(doc)) == doc


def test_lexer_positions():
    toks = tokenize('a\n  "x" ->')
    assert [(t.kind, t.line, t.column) for t in toks] == [
        ("WORD", 1, 1),
        ("STRING", 2, 3),
        ("ARROW", 2, 7),
        ("EOF", 2, 9),
    ]


@settings(max_examples=500, deadline=None)
@given(st.integers(0, 2**32))
def test_random_documents_round_trip(seed):
    doc = random_document(random.Random(seed), max_depth=6)
    text = serialize(doc)
    assert parse(text) == doc
    assert serialize(parse(text)) == text
