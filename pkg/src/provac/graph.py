"""OPM+ provenance graphs: typed, labelled DAGs with attribute nodes."""

from __future__ import annotations

import json
from collections.abc import Iterable, Iterator, Mapping
from dataclasses import dataclass, field
from enum import Enum
from fnmatch import fnmatchcase
from graphlib import CycleError, TopologicalSorter
from typing import Any, NamedTuple

from provac import attributes as attrs
from provac.errors import GraphParseError, GraphValidationError, WalkLimitExceeded


class VertexType(Enum):
    AGENT = "agent"
    ARTIFACT = "artifact"
    PROCESS = "process"
    ATTRIBUTE = "attribute"

    @property
    def short(self) -> str:
        return {"agent": "Ag", "artifact": "A", "process": "P", "attribute": "Att"}[self.value]


class EdgeLabel(Enum):
    USED = "u"
    WAS_GENERATED_BY = "wgb"
    WAS_CONTROLLED_BY = "wcb"
    WAS_TRIGGERED_BY = "wtb"
    WAS_DERIVED_FROM = "wdf"
    HAS_ATTRIBUTES = "ha"

    @classmethod
    def parse(cls, text: str) -> EdgeLabel:
        key = _LABEL_ALIASES.get(text, text)
        return cls(key)


_LABEL_ALIASES = {
    "used": "u",
    "wasGeneratedBy": "wgb",
    "wasControlledBy": "wcb",
    "wasTriggeredBy": "wtb",
    "wasDerivedFrom": "wdf",
    "hasAttributes": "ha",
}

_Ag, _A, _P, _Att = VertexType.AGENT, VertexType.ARTIFACT, VertexType.PROCESS, VertexType.ATTRIBUTE

#: The allowable (source type, target type, label) triples.
ALLOWED_EDGES = frozenset(
    {
        (_P, _A, EdgeLabel.USED),
        (_A, _P, EdgeLabel.WAS_GENERATED_BY),
        (_P, _Ag, EdgeLabel.WAS_CONTROLLED_BY),
        (_A, _A, EdgeLabel.WAS_DERIVED_FROM),
        (_P, _P, EdgeLabel.WAS_TRIGGERED_BY),
        (_Ag, _Att, EdgeLabel.HAS_ATTRIBUTES),
        (_P, _Att, EdgeLabel.HAS_ATTRIBUTES),
        (_A, _Att, EdgeLabel.HAS_ATTRIBUTES),
    }
)


@dataclass(frozen=True)
class Vertex:
    """A graph vertex.

    For agents, artifacts and processes ``attributes`` is the flattened view of
    every attribute node linked by ``ha``; for attribute nodes it holds the
    node's own items.
    """

    id: str
    vtype: VertexType
    name: str
    class_name: str
    attributes: Mapping[str, attrs.AttributeValue] = field(default_factory=dict)


@dataclass(frozen=True)
class Edge:
    source: str
    target: str
    label: EdgeLabel

    @property
    def sort_key(self) -> tuple[str, str, str]:
        return (self.source, self.target, self.label.value)


class ProvenanceGraph:
    """An immutable provenance graph; construct through :func:`load_graph`."""

    def __init__(self, vertices: Iterable[Vertex] = (), edges: Iterable[Edge] = ()) -> None:
        self.vertices: dict[str, Vertex] = {}
        for v in sorted(vertices, key=lambda v: v.id):
            self.vertices[v.id] = v
        self.edges: tuple[Edge, ...] = tuple(sorted(edges, key=lambda e: e.sort_key))
        self._out: dict[str, list[int]] = {vid: [] for vid in self.vertices}
        self._in: dict[str, list[int]] = {vid: [] for vid in self.vertices}
        for i, e in enumerate(self.edges):
            self._out.setdefault(e.source, []).append(i)
            self._in.setdefault(e.target, []).append(i)

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, ProvenanceGraph):
            return NotImplemented
        return self.vertices == other.vertices and [e.sort_key for e in self.edges] == [
            e.sort_key for e in other.edges
        ]

    def __repr__(self) -> str:
        return f"ProvenanceGraph({len(self.vertices)} vertices, {len(self.edges)} edges)"

    def __len__(self) -> int:
        return len(self.vertices)

    def is_empty(self) -> bool:
        return not self.vertices

    def main_vertices(self) -> list[Vertex]:
        """Agents, artifacts and processes, ordered by id."""
        return [v for v in self.vertices.values() if v.vtype is not VertexType.ATTRIBUTE]

    def steps(self, vid: str, reverse: bool = False) -> list[tuple[int, str]]:
        """(edge index, next vertex) pairs leaving ``vid``, skipping attribute nodes."""
        out = []
        for i in (self._in if reverse else self._out).get(vid, ()):
            e = self.edges[i]
            nxt = e.source if reverse else e.target
            v = self.vertices.get(nxt)
            if v is not None and v.vtype is not VertexType.ATTRIBUTE:
                out.append((i, nxt))
        return out

    def attribute_nodes(self, owner: str) -> list[Vertex]:
        found = []
        for i in self._out.get(owner, ()):
            e = self.edges[i]
            v = self.vertices.get(e.target)
            if e.label is EdgeLabel.HAS_ATTRIBUTES and v is not None and v.vtype is VertexType.ATTRIBUTE:
                found.append(v)
        return found


@dataclass(frozen=True)
class Violation:
    kind: str
    message: str

    def __str__(self) -> str:
        return f"{self.kind}: {self.message}"


@dataclass
class ValidationReport:
    violations: list[Violation] = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return not self.violations


def validate(g: ProvenanceGraph) -> ValidationReport:
    report = ValidationReport()
    add = report.violations.append
    for v in g.vertices.values():
        if v.vtype is not VertexType.ATTRIBUTE and not v.class_name:
            add(Violation("class", f"vertex {v.id!r} has an empty class name"))
    for e in g.edges:
        src, dst = g.vertices.get(e.source), g.vertices.get(e.target)
        if src is None or dst is None:
            missing = e.source if src is None else e.target
            add(Violation("dangling", f"edge {e.source}->{e.target} ({e.label.value}) references unknown vertex {missing!r}"))
            continue
        triple = (src.vtype, dst.vtype, e.label)
        if triple not in ALLOWED_EDGES:
            add(
                Violation(
                    "triple",
                    f"edge {e.source}->{e.target}: ({src.vtype.short}, {dst.vtype.short}, {e.label.value}) triple not in E",
                )
            )
    sorter: TopologicalSorter[str] = TopologicalSorter()
    for v in g.main_vertices():
        sorter.add(v.id, *(nxt for _, nxt in g.steps(v.id)))
    try:
        sorter.prepare()
    except CycleError as exc:
        cycle = " -> ".join(exc.args[1])
        add(Violation("cycle", f"cycle through {cycle}"))
    for v in g.main_vertices():
        merged: dict[str, attrs.AttributeValue] = {}
        for node in g.attribute_nodes(v.id):
            for key, value in node.attributes.items():
                if key in merged and merged[key] != value:
                    add(Violation("attribute-conflict", f"vertex {v.id!r} has conflicting values for {key!r}"))
                merged[key] = value
        if dict(v.attributes) != merged:
            add(Violation("attribute-view", f"vertex {v.id!r} attributes disagree with its attribute nodes"))
    return report


# -- ingestion ---------------------------------------------------------------


def _require(obj: Mapping[str, Any], key: str, where: str) -> Any:
    if key not in obj:
        raise GraphParseError(f"{where}: missing field {key!r}")
    return obj[key]


def _decode_attributes(raw: object, where: str) -> dict[str, attrs.AttributeValue]:
    if raw is None:
        return {}
    if not isinstance(raw, dict):
        raise GraphParseError(f"{where}: attributes must be an object")
    try:
        return {str(k): attrs.from_json(v) for k, v in raw.items()}
    except ValueError as exc:
        raise GraphParseError(f"{where}: {exc}") from exc


def attribute_node_id(owner: str) -> str:
    return f"{owner}@attrs"


def load_graph(document: str | bytes | Mapping[str, Any]) -> ProvenanceGraph:
    """Build and validate a graph from its JSON ingestion document.

    Inline ``attributes`` on agents/artifacts/processes are materialized as an
    attribute node joined by ``ha``; explicit attribute nodes are flattened
    into their owners.  Either way both views end up populated.
    """
    if isinstance(document, (str, bytes)):
        try:
            document = json.loads(document)
        except json.JSONDecodeError as exc:
            raise GraphParseError(f"malformed graph JSON: {exc}") from exc
    if not isinstance(document, Mapping):
        raise GraphParseError("graph document must be a JSON object")
    version = document.get("version", 1)
    if version != 1:
        raise GraphParseError(f"unsupported graph version {version!r}")
    raw_vertices = document.get("vertices", [])
    raw_edges = document.get("edges", [])
    if not isinstance(raw_vertices, list) or not isinstance(raw_edges, list):
        raise GraphParseError("'vertices' and 'edges' must be lists")

    vertices: dict[str, Vertex] = {}
    inline: dict[str, dict[str, attrs.AttributeValue]] = {}
    for n, raw in enumerate(raw_vertices):
        where = f"vertices[{n}]"
        if not isinstance(raw, dict):
            raise GraphParseError(f"{where}: must be an object")
        vid = str(_require(raw, "id", where))
        try:
            vtype = VertexType(_require(raw, "type", where))
        except ValueError:
            raise GraphParseError(f"{where}: unknown vertex type {raw['type']!r}") from None
        if vid in vertices:
            raise GraphParseError(f"duplicate vertex id {vid!r}")
        items = _decode_attributes(raw.get("attributes"), where)
        if vtype is VertexType.ATTRIBUTE:
            name = str(raw.get("name", "attributes"))
            vertices[vid] = Vertex(vid, vtype, name, str(raw.get("class", "Attribute")), items)
        else:
            name = str(_require(raw, "name", where))
            vertices[vid] = Vertex(vid, vtype, name, str(raw.get("class", name)), {})
            if items:
                inline[vid] = items

    edges: list[Edge] = []
    for n, raw in enumerate(raw_edges):
        where = f"edges[{n}]"
        if not isinstance(raw, dict):
            raise GraphParseError(f"{where}: must be an object")
        try:
            label = EdgeLabel.parse(_require(raw, "label", where))
        except ValueError:
            raise GraphParseError(f"{where}: unknown edge label {raw['label']!r}") from None
        edges.append(Edge(str(_require(raw, "from", where)), str(_require(raw, "to", where)), label))

    for owner, items in inline.items():
        node_id = attribute_node_id(owner)
        if node_id in vertices:
            raise GraphParseError(f"duplicate vertex id {node_id!r} (materialized attributes of {owner!r})")
        vertices[node_id] = Vertex(node_id, VertexType.ATTRIBUTE, "attributes", "Attribute", items)
        edges.append(Edge(owner, node_id, EdgeLabel.HAS_ATTRIBUTES))

    g = ProvenanceGraph(vertices.values(), edges)
    flattened = []
    for v in g.vertices.values():
        if v.vtype is VertexType.ATTRIBUTE:
            flattened.append(v)
            continue
        merged: dict[str, attrs.AttributeValue] = {}
        for node in g.attribute_nodes(v.id):
            merged.update(node.attributes)
        flattened.append(Vertex(v.id, v.vtype, v.name, v.class_name, merged))
    g = ProvenanceGraph(flattened, g.edges)

    report = validate(g)
    if not report.ok:
        raise GraphValidationError(report.violations)
    return g


def dump_graph(g: ProvenanceGraph) -> dict[str, Any]:
    """Canonical document: vertices and edges sorted, attributes only on attribute nodes."""
    vertices = []
    for v in g.vertices.values():
        doc: dict[str, Any] = {"id": v.id, "type": v.vtype.value, "name": v.name, "class": v.class_name}
        if v.vtype is VertexType.ATTRIBUTE:
            doc["attributes"] = {k: attrs.to_json(val) for k, val in sorted(v.attributes.items())}
        vertices.append(doc)
    edges = [{"from": e.source, "to": e.target, "label": e.label.value} for e in g.edges]
    return {"version": 1, "vertices": vertices, "edges": edges}


def dumps_graph(g: ProvenanceGraph) -> str:
    return json.dumps(dump_graph(g), indent=2, sort_keys=True, ensure_ascii=False) + "\n"


# -- class names and aliases -------------------------------------------------


@dataclass(frozen=True)
class AliasTable:
    """Maps an abstract class name to glob patterns over concrete names or classes.

    Matching is case-insensitive throughout.
    """

    entries: Mapping[str, tuple[str, ...]] = field(default_factory=dict)

    @classmethod
    def from_mapping(cls, raw: Mapping[str, Any]) -> AliasTable:
        entries = {}
        for key, value in raw.items():
            patterns = (value,) if isinstance(value, str) else tuple(value)
            entries[str(key)] = tuple(str(p) for p in patterns)
        return cls(entries)

    def patterns_for(self, class_name: str) -> tuple[str, ...]:
        wanted = class_name.lower()
        found: list[str] = []
        for key, patterns in self.entries.items():
            if key.lower() == wanted:
                found.extend(patterns)
        return tuple(found)

    def matches(self, class_name: str, vertex: Vertex) -> bool:
        wanted = class_name.lower()
        names = (vertex.class_name.lower(), vertex.name.lower())
        if wanted in names:
            return True
        return any(fnmatchcase(n, p.lower()) for p in self.patterns_for(class_name) for n in names)

    def __bool__(self) -> bool:
        return bool(self.entries)


NO_ALIASES = AliasTable()


def vertices_by_class(
    g: ProvenanceGraph, vtype: VertexType, class_name: str, aliases: AliasTable | None = None
) -> list[Vertex]:
    table = aliases or NO_ALIASES
    return [v for v in g.vertices.values() if v.vtype is vtype and table.matches(class_name, v)]


# -- walks -------------------------------------------------------------------

DEFAULT_WALK_CAP = 200_000


class Walk(NamedTuple):
    vertices: tuple[str, ...]
    edges: tuple[int, ...]


def directed_walks(
    g: ProvenanceGraph, max_len: int, *, reverse: bool = False, cap: int = DEFAULT_WALK_CAP
) -> Iterator[Walk]:
    """Every directed walk of 1..max_len vertices, one per distinct edge sequence.

    Attribute nodes are never visited.  ``reverse`` follows edges against
    their stored direction.
    """
    if max_len < 1:
        raise ValueError("max_len must be at least 1")
    count = 0

    def extend(walk: Walk) -> Iterator[Walk]:
        nonlocal count
        count += 1
        if count > cap:
            raise WalkLimitExceeded(f"more than {cap} walks")
        yield walk
        if len(walk.vertices) == max_len:
            return
        for i, nxt in g.steps(walk.vertices[-1], reverse):
            yield from extend(Walk(walk.vertices + (nxt,), walk.edges + (i,)))

    for v in g.main_vertices():
        yield from extend(Walk((v.id,), ()))
