"""Atomic targets and their four-valued evaluation against a graph and request.

Grades
------
A single vertex target scores each vertex and keeps the best score:

* pair ``(type, name)``: 1 when both match, ⊥ when only the type does, × otherwise;
* quaternion ``(type, name, value, predicate)``: 1 when everything holds,
  ⊥ when type and name hold but the value test fails, 0 when only the type
  holds, × otherwise.

A path pattern grades every element of a walk (1 full match, 0 type and name,
⊥ type only, × no type) and the walk scores the lowest element grade; the
pattern takes the best walk.
"""

from __future__ import annotations

from collections.abc import Mapping, Sequence
from dataclasses import dataclass, field
from functools import lru_cache
from typing import Union

from provac import attributes as attrs
from provac.attributes import AttributeValue, Predicate
from provac.errors import RequestParseError
from provac.graph import (
    DEFAULT_WALK_CAP,
    NO_ALIASES,
    AliasTable,
    ProvenanceGraph,
    Vertex,
    VertexType,
    directed_walks,
)
from provac.lattice.values import Decision4, Space, Value

ONE_T = Decision4(Value.ONE, Space.TARGET)
CROSS_T = Decision4(Value.CROSS, Space.TARGET)


@dataclass(frozen=True)
class Request:
    subject: str
    action: str = ""
    object: str = ""
    attributes: Mapping[str, AttributeValue] = field(default_factory=dict)

    def __post_init__(self) -> None:
        if not self.subject:
            raise RequestParseError("request subject must be nonempty")

    def lookup(self, name: str) -> AttributeValue | None:
        """Resolve a ``$name`` binding: subject/action/object, then attributes."""
        if name in self.attributes:
            return self.attributes[name]
        if name in ("subject", "action", "object"):
            return getattr(self, name)
        return None

    @classmethod
    def from_json(cls, raw: object) -> Request:
        if not isinstance(raw, dict):
            raise RequestParseError("request must be a JSON object")
        try:
            items = {str(k): attrs.from_json(v) for k, v in (raw.get("attributes") or {}).items()}
        except (ValueError, AttributeError) as exc:
            raise RequestParseError(f"bad request attributes: {exc}") from exc
        subject = raw.get("subject")
        if not isinstance(subject, str):
            raise RequestParseError("request needs a string 'subject'")
        return cls(subject, str(raw.get("action", "")), str(raw.get("object", "")), items)


@dataclass(frozen=True)
class Quaternion:
    """``(vtype, vname)`` optionally refined by an attribute test.

    The test compares vertex attribute ``key`` against either a literal
    ``value`` or the request attribute named by ``binding``.
    """

    vtype: VertexType
    vname: str
    key: str | None = None
    value: AttributeValue | None = None
    binding: str | None = None
    pred: Predicate = Predicate.EQ

    def __post_init__(self) -> None:
        if self.vtype is VertexType.ATTRIBUTE:
            raise ValueError("quaternions range over agents, artifacts and processes")
        if self.key is None:
            if self.value is not None or self.binding is not None or self.pred is not Predicate.EQ:
                raise ValueError("a value, binding or predicate needs an attribute key")
        elif (self.value is None) == (self.binding is None):
            raise ValueError("give exactly one of a literal value or a request binding")

    @property
    def has_test(self) -> bool:
        return self.key is not None


@dataclass(frozen=True)
class Plus:
    """``\\v+``: one or more intermediate vertices."""


@dataclass(frozen=True)
class Exactly:
    """``\\v{k}``: exactly ``k`` intermediate vertices."""

    count: int

    def __post_init__(self) -> None:
        if self.count < 1:
            raise ValueError("\\v{k} needs k >= 1")


PathElement = Union[Quaternion, Plus, Exactly]


@dataclass(frozen=True)
class PathPattern:
    elements: tuple[PathElement, ...]
    reverse: bool = False

    def __post_init__(self) -> None:
        if not self.elements:
            raise ValueError("empty path pattern")
        if not isinstance(self.elements[0], Quaternion) or not isinstance(self.elements[-1], Quaternion):
            raise ValueError("a path pattern must start and end with a vertex pattern")

    def segments(self) -> tuple[tuple[Quaternion, ...], tuple[tuple[int, bool], ...]]:
        """Quaternions plus, between each consecutive pair, (minimum gap, unbounded)."""
        quats: list[Quaternion] = []
        gaps: list[tuple[int, bool]] = []
        gap, open_ended = 0, False
        for el in self.elements:
            if isinstance(el, Quaternion):
                if quats:
                    gaps.append((gap, open_ended))
                quats.append(el)
                gap, open_ended = 0, False
            elif isinstance(el, Plus):
                gap, open_ended = gap + 1, True
            else:
                gap += el.count
        return tuple(quats), tuple(gaps)


@dataclass(frozen=True)
class NullTarget:
    pass


@dataclass(frozen=True)
class SingleTarget:
    quaternion: Quaternion


@dataclass(frozen=True)
class PathTarget:
    pattern: PathPattern


@dataclass(frozen=True)
class RequestTarget:
    name: str
    value: AttributeValue
    pred: Predicate = Predicate.EQ


AtomicTarget = Union[NullTarget, SingleTarget, PathTarget, RequestTarget]


@dataclass(frozen=True)
class Match:
    """An evaluation result with the evidence behind it."""

    decision: Decision4
    vertices: tuple[str, ...] = ()
    notes: tuple[str, ...] = ()


# -- vertex grading ----------------------------------------------------------

# Element grades, ordered like decision values.
FULL, NAMED, TYPED, NONE = Value.ONE, Value.ZERO, Value.BOT, Value.CROSS


def _vertex_value(v: Vertex, key: str) -> AttributeValue | None:
    if key in v.attributes:
        return v.attributes[key]
    if key == "id":
        return v.id
    if key == "name":
        return v.name
    return None


def _value_test(q: Quaternion, v: Vertex, req: Request | None, notes: list[str] | None) -> bool:
    if q.binding is not None:
        wanted = req.lookup(q.binding) if req is not None else None
        if wanted is None:
            if notes is not None:
                notes.append(f"request binding ${q.binding} is missing")
            return False
    else:
        wanted = q.value
    have = _vertex_value(v, q.key)
    return have is not None and attrs.compare(have, q.pred, wanted)


def element_grade(
    q: Quaternion, v: Vertex, req: Request | None, aliases: AliasTable = NO_ALIASES, notes=None
) -> Value:
    """Grade of one vertex against one path element."""
    aliases = aliases or NO_ALIASES
    if v.vtype is not q.vtype:
        return NONE
    if not aliases.matches(q.vname, v):
        return TYPED
    if q.has_test and not _value_test(q, v, req, notes):
        return NAMED
    return FULL


def eval_quaternion(
    q: Quaternion, v: Vertex, req: Request | None = None, aliases: AliasTable = NO_ALIASES, notes=None
) -> Decision4:
    """Score of one vertex against a single-vertex target."""
    aliases = aliases or NO_ALIASES
    if v.vtype is not q.vtype:
        return CROSS_T
    named = aliases.matches(q.vname, v)
    if not q.has_test:
        return Decision4(Value.ONE if named else Value.BOT)
    if not named:
        return Decision4(Value.ZERO)
    if _value_test(q, v, req, notes):
        return ONE_T
    return Decision4(Value.BOT)


# -- path matching -----------------------------------------------------------


def match_path(
    p: PathPattern, g: ProvenanceGraph, req: Request | None = None, aliases: AliasTable = NO_ALIASES
) -> Match:
    """Best walk score for ``p`` by dynamic programming over the DAG.

    ``best(i, v)`` is the best score of a walk matching quaternions ``i..`` with
    quaternion ``i`` placed on ``v``: the minimum of the local grade and the
    best continuation reachable across the gap that follows.
    """
    aliases = aliases or NO_ALIASES
    quats, gaps = p.segments()
    main = [v.id for v in g.main_vertices()]
    notes: list[str] = []
    grades = [{vid: element_grade(q, g.vertices[vid], req, aliases, notes) for vid in main} for q in quats]

    @lru_cache(maxsize=None)
    def after_steps(vid: str, steps: int) -> frozenset[str]:
        if steps == 0:
            return frozenset((vid,))
        out: set[str] = set()
        for _, nxt in g.steps(vid, p.reverse):
            out |= after_steps(nxt, steps - 1)
        return frozenset(out)

    @lru_cache(maxsize=None)
    def descendants(vid: str) -> frozenset[str]:
        out = {vid}
        for _, nxt in g.steps(vid, p.reverse):
            out |= descendants(nxt)
        return frozenset(out)

    def landing(vid: str, gap: tuple[int, bool]) -> frozenset[str]:
        count, open_ended = gap
        exact = after_steps(vid, count + 1)
        if not open_ended:
            return exact
        out: set[str] = set()
        for w in exact:
            out |= descendants(w)
        return frozenset(out)

    @lru_cache(maxsize=None)
    def best(i: int, vid: str) -> tuple[Value, tuple[str, ...]]:
        local = grades[i][vid]
        if i == len(quats) - 1 or local is NONE:
            return local, (vid,)
        top: tuple[Value, tuple[str, ...]] = (NONE, ())
        for w in sorted(landing(vid, gaps[i])):
            cand = best(i + 1, w)
            if cand[0] > top[0]:
                top = cand
        if not top[1]:
            return NONE, ()
        return min(local, top[0]), (vid,) + top[1]

    result: tuple[Value, tuple[str, ...]] = (NONE, ())
    for vid in main:
        cand = best(0, vid)
        if cand[0] > result[0]:
            result = cand
    return Match(Decision4(result[0]), result[1] if result[0] is not NONE else (), tuple(dict.fromkeys(notes)))


def match_path_oracle(
    p: PathPattern,
    g: ProvenanceGraph,
    req: Request | None = None,
    aliases: AliasTable = NO_ALIASES,
    cap: int = DEFAULT_WALK_CAP,
) -> Decision4:
    """Brute-force reference for :func:`match_path` over enumerated walks.

    Raises :class:`~provac.errors.WalkLimitExceeded` when the graph is too
    large to enumerate.
    """
    quats, gaps = p.segments()
    shortest = len(quats) + sum(n for n, _ in gaps)
    open_ended = any(o for _, o in gaps)
    longest = len(g.main_vertices()) if open_ended else shortest
    if g.is_empty() or longest < shortest:
        return CROSS_T

    def fits(walk: Sequence[str], qi: int, pos: int) -> list[Value]:
        # all scores for aligning quats[qi:] with walk[pos:] exactly
        grade = element_grade(quats[qi], g.vertices[walk[pos]], req, aliases)
        if qi == len(quats) - 1:
            return [grade] if pos == len(walk) - 1 else []
        count, unbounded = gaps[qi]
        nexts = range(pos + count + 1, len(walk)) if unbounded else [pos + count + 1]
        scores = []
        for nxt in nexts:
            if nxt < len(walk):
                scores += [min(grade, s) for s in fits(walk, qi + 1, nxt)]
        return scores

    best = NONE
    for walk in directed_walks(g, longest, reverse=p.reverse, cap=cap):
        if len(walk.vertices) < shortest:
            continue
        for score in fits(walk.vertices, 0, 0):
            best = max(best, score)
    return Decision4(best)


# -- atomic targets ----------------------------------------------------------


def evaluate_atomic(
    t: AtomicTarget, g: ProvenanceGraph, req: Request | None = None, aliases: AliasTable = NO_ALIASES
) -> Match:
    aliases = aliases or NO_ALIASES
    if isinstance(t, NullTarget):
        return Match(ONE_T)
    if isinstance(t, RequestTarget):
        have = req.lookup(t.name) if req is not None else None
        if have is not None and attrs.compare(have, t.pred, t.value):
            return Match(ONE_T)
        note = (f"request attribute {t.name!r} is missing",) if have is None else ()
        return Match(CROSS_T, notes=note)
    if g.is_empty():
        return Match(CROSS_T, notes=("empty provenance graph",))
    if isinstance(t, SingleTarget):
        best, where, notes = CROSS_T, (), []
        for v in g.main_vertices():
            score = eval_quaternion(t.quaternion, v, req, aliases, notes)
            if score.value > best.value:
                best, where = score, (v.id,)
        return Match(best, where, tuple(dict.fromkeys(notes)))
    if isinstance(t, PathTarget):
        return match_path(t.pattern, g, req, aliases)
    raise TypeError(f"not an atomic target: {t!r}")


def eval_atomic_target(
    t: AtomicTarget, g: ProvenanceGraph, req: Request | None = None, aliases: AliasTable = NO_ALIASES
) -> Decision4:
    return evaluate_atomic(t, g, req, aliases).decision
