"""Target expressions: evaluation, the applicability gate, and equivalence checks."""

from __future__ import annotations

import itertools
from collections.abc import Mapping
from dataclasses import dataclass, field

from provac.errors import ConfigurationError, EquivalenceTooLarge
from provac.expr import Atom, Binary, Expr, Ref, Uary, Unary, refs
from provac.graph import AliasTable, ProvenanceGraph
from provac.lattice.tables import apply_binary, apply_uary, apply_unary
from provac.lattice.values import CANONICAL, Decision4, Space, Value
from provac.targets import Request, evaluate_atomic
from provac.trace import TraceRecord


def describe(e: Expr) -> str:
    if isinstance(e, Atom):
        return type(e.target).__name__.removesuffix("Target").lower()
    return type(e).__name__.lower()


class TargetEvaluator:
    """Bottom-up evaluation of one policy's target section.

    Named declarations are evaluated at most once and recorded under their
    own name; every other node is recorded under a dotted path from its root.
    """

    section = "target"

    def __init__(
        self,
        g: ProvenanceGraph,
        req: Request | None,
        decls: Mapping[str, Expr] | None = None,
        aliases: AliasTable | None = None,
        policy: str = "",
    ) -> None:
        self.g = g
        self.req = req
        self.decls = dict(decls or {})
        self.aliases = aliases
        self.policy = policy
        self.records: list[TraceRecord] = []
        self.memo: dict[str, Decision4] = {}

    def record(self, node: str, kind: str, decision: Decision4, **extra) -> Decision4:
        self.records.append(TraceRecord(self.section, node, kind, str(decision), self.policy, **extra))
        return decision

    def named(self, name: str) -> Decision4:
        if name not in self.memo:
            if name not in self.decls:
                raise ConfigurationError(f"undeclared target {name!r}")
            self.memo[name] = self.eval(self.decls[name], name)
        return self.memo[name]

    def eval(self, e: Expr, node: str = "target") -> Decision4:
        if isinstance(e, Atom):
            m = evaluate_atomic(e.target, self.g, self.req, self.aliases)
            return self.record(node, describe(e), m.decision, vertices=m.vertices, notes=m.notes)
        if isinstance(e, Ref):
            return self.record(node, "ref", self.named(e.name), detail=e.name)
        if isinstance(e, Unary):
            val = apply_unary(e.op, self.eval(e.child, f"{node}.0"))
            return self.record(node, "unary", val, detail=e.op)
        if isinstance(e, Binary):
            left = self.eval(e.left, f"{node}.0")
            right = self.eval(e.right, f"{node}.1")
            return self.record(node, "binary", apply_binary(e.op, left, right), detail=e.op)
        if isinstance(e, Uary):
            vals = [self.eval(c, f"{node}.{i}") for i, c in enumerate(e.children)]
            return self.record(node, "uary", apply_uary(e.op, vals), detail=e.op)
        raise TypeError(f"{describe(e)} nodes are not allowed in a target expression")


@dataclass
class TargetResult:
    decision: Decision4
    records: list[TraceRecord] = field(default_factory=list)


def eval_target(
    e: Expr,
    g: ProvenanceGraph,
    req: Request | None = None,
    *,
    decls: Mapping[str, Expr] | None = None,
    aliases: AliasTable | None = None,
) -> TargetResult:
    ev = TargetEvaluator(g, req, decls, aliases)
    decision = ev.eval(e)
    return TargetResult(decision, ev.records)


@dataclass
class Gate:
    """Applicable iff the target evaluated to 1_T; otherwise carries the decision."""

    applicable: bool
    decision: Decision4
    records: list[TraceRecord] = field(default_factory=list)


def gate(
    e: Expr,
    g: ProvenanceGraph,
    req: Request | None = None,
    *,
    decls: Mapping[str, Expr] | None = None,
    aliases: AliasTable | None = None,
) -> Gate:
    result = eval_target(e, g, req, decls=decls, aliases=aliases)
    return Gate(result.decision.value is Value.ONE, result.decision, result.records)


# -- equivalence -------------------------------------------------------------

MAX_VARIABLES = 4


def eval_schema(e: Expr, env: Mapping[str, Decision4]) -> Decision4:
    """Evaluate an expression whose leaves are variables bound in ``env``."""
    if isinstance(e, Ref):
        return env[e.name]
    if isinstance(e, Unary):
        return apply_unary(e.op, eval_schema(e.child, env))
    if isinstance(e, Binary):
        return apply_binary(e.op, eval_schema(e.left, env), eval_schema(e.right, env))
    if isinstance(e, Uary):
        return apply_uary(e.op, [eval_schema(c, env) for c in e.children])
    raise TypeError(f"{describe(e)} nodes cannot appear in an equivalence schema")


def schema_variables(*exprs: Expr) -> list[str]:
    return sorted({r.name for e in exprs for r in refs(e)})


@dataclass(frozen=True)
class EquivalenceResult:
    equivalent: bool
    cases: int
    agreeing: int
    variables: tuple[str, ...]
    counterexample: dict[str, Decision4] | None = None
    left_value: Decision4 | None = None
    right_value: Decision4 | None = None

    def __str__(self) -> str:
        if self.equivalent:
            return f"equivalent ({self.agreeing}/{self.cases})"
        shown = ", ".join(f"{k}={v}" for k, v in (self.counterexample or {}).items())
        return f"counterexample {shown}: {self.left_value} vs {self.right_value} ({self.agreeing}/{self.cases} agree)"


def check_equivalence(e1: Expr, e2: Expr, space: Space = Space.TARGET) -> EquivalenceResult:
    """Compare two schemas on every assignment of decision values to their variables.

    Assignments are enumerated in canonical order (1, 0, ⊥, × per variable,
    variables sorted by name); the first disagreement is the counterexample.
    """
    names = schema_variables(e1, e2)
    if len(names) > MAX_VARIABLES:
        raise EquivalenceTooLarge(f"{len(names)} variables exceeds the limit of {MAX_VARIABLES}")
    first = None
    agreeing = 0
    cases = 0
    for combo in itertools.product(CANONICAL, repeat=len(names)):
        env = {n: Decision4(v, space) for n, v in zip(names, combo)}
        a, b = eval_schema(e1, env), eval_schema(e2, env)
        cases += 1
        if a == b:
            agreeing += 1
        elif first is None:
            first = (env, a, b)
    if first is None:
        return EquivalenceResult(True, cases, agreeing, tuple(names))
    env, a, b = first
    return EquivalenceResult(False, cases, agreeing, tuple(names), env, a, b)
