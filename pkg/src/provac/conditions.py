"""Access-control sections: transformations, finalizers, policies and decisions."""

from __future__ import annotations

import itertools
from collections.abc import Iterable, Mapping, Sequence
from dataclasses import dataclass, field

from provac.algebra import TargetEvaluator, describe
from provac.errors import ConfigurationError, SpaceMismatchError
from provac.expr import Atom, Const, Expr, Ref, Transform
from provac.graph import AliasTable, ProvenanceGraph
from provac.lattice.tables import (
    OPERATORS,
    PRINTED,
    SYMBOLS,
    UARY_OPS,
    UNARY_OPS,
    apply_binary,
    apply_uary,
    apply_unary,
    parse_grid,
)
from provac.lattice.values import CANONICAL, Decision4, Space, Value, index_of
from provac.targets import Request, evaluate_atomic
from provac.trace import EvaluationTrace, TraceRecord

DIRECTIONS = ("fwd", "rev")
FINALIZERS = ("pbd", "dbd", "none")


def _grid(name: str) -> list[list[Value]]:
    return [[Value.from_token(t) for t in row] for row in parse_grid(PRINTED[name])]


_TRANSFORM = {d: _grid(d) for d in DIRECTIONS}
_FINAL = {m: [row[0] for row in _grid(m)] for m in ("pbd", "dbd")}


def transform(tval: Decision4, direction: str, tag: Value) -> Decision4:
    """Recast a target decision as a policy decision (``fwd`` is ≺, ``rev`` is ≻)."""
    if tval.space is not Space.TARGET:
        raise SpaceMismatchError(f"transformations take target decisions, got {tval}")
    if direction not in _TRANSFORM:
        raise ConfigurationError(f"unknown transformation direction {direction!r}")
    cell = _TRANSFORM[direction][index_of(tval.value)][index_of(tag)]
    return Decision4(cell, Space.POLICY)


def apply_prefix(prefix: Sequence[str], tval: Decision4) -> Decision4:
    """Apply a unary term written outermost first, e.g. ``("opt", "not")`` is ``~(¬t)``."""
    for op in reversed(prefix):
        tval = apply_unary(op, tval)
    return tval


def transform_prefixed(tval: Decision4, prefix: Sequence[str], direction: str, tag: Value) -> Decision4:
    return transform(apply_prefix(prefix, tval), direction, tag)


def finalize(p: Decision4, mode: str) -> Decision4:
    """Collapse a policy decision with ``pbd`` or ``dbd``; ``none`` passes it through."""
    if p.space is not Space.POLICY:
        raise SpaceMismatchError(f"finalizers take policy decisions, got {p}")
    if mode == "none":
        return p
    if mode not in _FINAL:
        raise ConfigurationError(f"unknown finalizer {mode!r}")
    return Decision4(_FINAL[mode][index_of(p.value)], Space.POLICY)


def transform_label(t: Transform, source: str) -> str:
    prefix = "".join(SYMBOLS[op] for op in t.prefix)
    return f"{prefix}{source} {SYMBOLS[t.direction]} p{{{t.tag.symbol}}}"


# -- policies ----------------------------------------------------------------


@dataclass(frozen=True)
class Policy:
    id: str
    target: Expr
    condition: Expr
    finalizer: str = "none"
    target_decls: tuple[tuple[str, Expr], ...] = ()
    condition_decls: tuple[tuple[str, Expr], ...] = ()

    def __post_init__(self) -> None:
        if self.finalizer not in FINALIZERS:
            raise ConfigurationError(f"unknown finalizer {self.finalizer!r}")


class ConditionEvaluator(TargetEvaluator):
    """Evaluates a condition tree in the policy space.

    Fresh patterns are evaluated like targets and cast one-to-one; a
    transformation reads its source from the target evaluator so that a
    referenced target node is never evaluated twice.
    """

    section = "condition"

    def __init__(self, targets: TargetEvaluator, decls: Mapping[str, Expr] | None = None) -> None:
        super().__init__(targets.g, targets.req, decls, targets.aliases, targets.policy)
        self.targets = targets

    def eval(self, e: Expr, node: str = "condition") -> Decision4:
        if isinstance(e, Const):
            if e.value.space is not Space.POLICY:
                raise SpaceMismatchError(f"condition constants live in the policy space, got {e.value}")
            return self.record(node, "constant", e.value)
        if isinstance(e, Atom):
            m = evaluate_atomic(e.target, self.g, self.req, self.aliases)
            return self.record(node, describe(e), m.decision.to_policy(), vertices=m.vertices, notes=m.notes)
        if isinstance(e, Transform):
            if isinstance(e.source, Ref):
                tval = self.targets.named(e.source.name)
                label = e.source.name
            elif isinstance(e.source, Atom):
                m = evaluate_atomic(e.source.target, self.g, self.req, self.aliases)
                tval = self.record(f"{node}.0", describe(e.source), m.decision, vertices=m.vertices)
                label = "t"
            else:
                raise TypeError("a transformation source must be a target name or an atomic target")
            val = transform_prefixed(tval, e.prefix, e.direction, e.tag)
            return self.record(node, "transform", val, detail=transform_label(e, label))
        return super().eval(e, node)


@dataclass
class PolicyResult:
    policy: str
    applicable: bool
    target: Decision4
    condition: Decision4 | None = None
    final: Decision4 | None = None
    records: list[TraceRecord] = field(default_factory=list)


def evaluate_policy(
    policy: Policy, g: ProvenanceGraph, req: Request | None = None, aliases: AliasTable | None = None
) -> PolicyResult:
    """Gate on the target, then evaluate and finalize the condition."""
    targets = TargetEvaluator(g, req, dict(policy.target_decls), aliases, policy.id)
    tval = targets.eval(policy.target)
    if tval.value is not Value.ONE:
        records = targets.records + [
            TraceRecord("policy", "gate", "gate", str(tval), policy.id, detail="not applicable")
        ]
        return PolicyResult(policy.id, False, tval, records=records)
    conditions = ConditionEvaluator(targets, dict(policy.condition_decls))
    cval = conditions.eval(policy.condition)
    final = finalize(cval, policy.finalizer)
    records = (
        targets.records
        + [TraceRecord("policy", "gate", "gate", str(tval), policy.id, detail="applicable")]
        + conditions.records
        + [TraceRecord("policy", "final", "finalizer", str(final), policy.id, detail=policy.finalizer)]
    )
    return PolicyResult(policy.id, True, tval, cval, final, records)


def check_combiner(combiner: str) -> None:
    if combiner in UARY_OPS:
        return
    table = OPERATORS.get(combiner)
    if table is None or table.arity != 2:
        raise ConfigurationError(f"unknown combiner {combiner!r}")


def combine(combiner: str, values: Sequence[Decision4]) -> Decision4:
    """Fold applicable policy decisions in order with a u-ary or binary operator."""
    check_combiner(combiner)
    if combiner in UARY_OPS:
        return apply_uary(combiner, values)
    acc = values[0]
    for v in values[1:]:
        acc = apply_binary(combiner, acc, v)
    return acc


PERMIT, DENY = "Permit", "Deny"


@dataclass
class Decision:
    outcome: str
    combined: Decision4 | None
    results: list[PolicyResult]
    trace: EvaluationTrace

    @property
    def applicable(self) -> list[str]:
        return [r.policy for r in self.results if r.applicable]


def decide(
    policies: Iterable[Policy],
    g: ProvenanceGraph,
    req: Request | None = None,
    combiner: str = "any",
    default: str = "deny",
    aliases: AliasTable | None = None,
) -> Decision:
    """Evaluate every policy, combine applicable results, and map to Permit/Deny.

    Only a combined 1_P permits.  With no applicable policy the ``default``
    (``"permit"`` or ``"deny"``) decides.
    """
    check_combiner(combiner)
    if default not in ("permit", "deny"):
        raise ConfigurationError(f"default must be 'permit' or 'deny', got {default!r}")
    results = [evaluate_policy(p, g, req, aliases) for p in policies]
    finals = [r.final for r in results if r.applicable and r.final is not None]
    trace = EvaluationTrace()
    for r in sorted(results, key=lambda r: r.policy):
        trace.extend(r.records)
    if not finals:
        outcome = PERMIT if default == "permit" else DENY
        combined = None
    else:
        combined = combine(combiner, finals)
        outcome = PERMIT if combined.value is Value.ONE else DENY
    trace.outcome = outcome
    return Decision(outcome, combined, results, trace)


# -- expressibility of prefixed transformations -------------------------------


@dataclass(frozen=True)
class ExpressibilityReport:
    ops: tuple[str, ...]
    max_depth: int
    reachable: dict[str, str]  # extension tokens -> first witness
    total: int = 256

    @property
    def count(self) -> int:
        return len(self.reachable)

    @property
    def complete(self) -> bool:
        return self.count == self.total


def prefix_words(ops: Sequence[str], max_depth: int) -> Iterable[tuple[str, ...]]:
    for n in range(max_depth + 1):
        yield from itertools.product(ops, repeat=n)


def expressibility_scan(ops: Sequence[str] = UNARY_OPS, max_depth: int = 4) -> ExpressibilityReport:
    """Which target-to-policy maps can ``*t ⋄ p{tag}`` realize?

    Enumerates every prefix word up to ``max_depth`` over ``ops``, both
    directions and all four tags, and records each distinct map once.
    """
    reachable: dict[str, str] = {}
    for word in prefix_words(ops, max_depth):
        for direction in DIRECTIONS:
            for tag in CANONICAL:
                ext = "".join(
                    transform_prefixed(Decision4(v), word, direction, tag).value.token for v in CANONICAL
                )
                if ext not in reachable:
                    reachable[ext] = transform_label(Transform(Ref("t"), direction, tag, word), "t")
    return ExpressibilityReport(tuple(ops), max_depth, reachable)
