"""Canonical text for policy documents."""

from __future__ import annotations

import json
import re

from provac.attributes import to_literal
from provac.conditions import Policy
from provac.dsl.parser import PolicyDocument
from provac.expr import Atom, Binary, Const, Expr, Ref, Transform, Uary, Unary
from provac.targets import (
    AtomicTarget,
    Exactly,
    NullTarget,
    PathTarget,
    Plus,
    Quaternion,
    RequestTarget,
    SingleTarget,
)

_IDENT = re.compile(r"[A-Za-z_][A-Za-z0-9_]*\Z")


def _name(text: str) -> str:
    return text if _IDENT.match(text) else json.dumps(text, ensure_ascii=False)


def quaternion(q: Quaternion) -> str:
    head = f"{q.vtype.value}:{_name(q.vname)}"
    if q.key is None:
        return head
    rhs = f"${q.binding}" if q.binding is not None else to_literal(q.value)
    return f"{head}[{_name(q.key)} {q.pred.value} {rhs}]"


def atomic(t: AtomicTarget) -> str:
    if isinstance(t, NullTarget):
        return "null"
    if isinstance(t, SingleTarget):
        return quaternion(t.quaternion)
    if isinstance(t, RequestTarget):
        return f"request[${t.name} {t.pred.value} {to_literal(t.value)}]"
    if isinstance(t, PathTarget):
        parts = []
        for el in t.pattern.elements:
            if isinstance(el, Plus):
                parts.append("\\v+")
            elif isinstance(el, Exactly):
                parts.append(f"\\v{{{el.count}}}")
            else:
                parts.append(quaternion(el))
        if t.pattern.reverse:
            parts.append("causal: reverse")
        return f"path({', '.join(parts)})"
    raise TypeError(f"not an atomic target: {t!r}")


def expression(e: Expr) -> str:
    if isinstance(e, Atom):
        return atomic(e.target)
    if isinstance(e, Ref):
        return e.name
    if isinstance(e, Const):
        return f"@{e.value.value.token}"
    if isinstance(e, Unary):
        inner = expression(e.child)
        if isinstance(e.child, Binary):
            inner = f"({inner})"
        return f"{e.op} {inner}"
    if isinstance(e, Binary):
        right = expression(e.right)
        if isinstance(e.right, Binary):
            right = f"({right})"
        return f"{expression(e.left)} {e.op} {right}"
    if isinstance(e, Uary):
        return f"{e.op}[{', '.join(expression(c) for c in e.children)}]"
    if isinstance(e, Transform):
        return transformation(e)
    raise TypeError(f"cannot serialize {e!r}")


def transformation(t: Transform) -> str:
    words = [*t.prefix, expression(t.source), f"{t.direction}({t.tag.token})"]
    return " ".join(words)


def policy(p: Policy) -> str:
    lines = [f"policy {_name(p.id)} {{"]
    for name, body in p.target_decls:
        lines.append(f"  target {name} = {expression(body)};")
    if p.target != Atom(NullTarget()):
        lines.append(f"  target: {expression(p.target)};")
    for name, body in p.condition_decls:
        if isinstance(body, Transform):
            lines.append(f"  {transformation(body)} -> {name};")
        else:
            lines.append(f"  condition {name} = {expression(body)};")
    lines.append(f"  condition: {expression(p.condition)};")
    if p.finalizer != "none":
        lines.append(f"  finalize: {p.finalizer};")
    lines.append("}")
    return "\n".join(lines)


def serialize(doc: PolicyDocument) -> str:
    out = [f"version: {doc.version};"]
    if doc.id is not None:
        out.append(f"id: {json.dumps(doc.id, ensure_ascii=False)};")
    for key, patterns in doc.aliases.entries.items():
        out.append(f"alias {_name(key)} = {', '.join(json.dumps(p, ensure_ascii=False) for p in patterns)};")
    for p in doc.policies:
        out.append("")
        out.append(policy(p))
    return "\n".join(out) + "\n"
