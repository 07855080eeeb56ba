"""Unary clone closure over finite carriers.

Starting from the identity, new unary functions are produced by applying a
unary generator to a known function, or a binary generator pointwise to two
known functions: ``x -> b(f(x), g(x))``.  Constants are never seeded; they
count only if some term derives them.  The search runs in rounds, so the
round in which a function first appears is the depth of its shortest term.
"""

from __future__ import annotations

from collections.abc import Iterable, Iterator, Mapping, Sequence
from dataclasses import dataclass, field

from provac.errors import ConfigurationError
from provac.lattice.tables import (
    OPERATORS,
    PRINTED_3,
    parse_grid,
)
from provac.lattice.values import CANONICAL, Decision4, Space, Value

MAX_DEPTH = 12

Ext = tuple[int, ...]


@dataclass(frozen=True)
class UnaryFunction4:
    """A unary map on the four values, identified by its values at 1, 0, ⊥, ×."""

    extension: tuple[Value, Value, Value, Value]
    witness: str | None = field(default=None, compare=False)
    depth: int = field(default=0, compare=False)

    def __call__(self, x: Decision4) -> Decision4:
        return Decision4(self.extension[CANONICAL.index(x.value)], x.space)

    def __str__(self) -> str:
        cells = " ".join(v.token for v in self.extension)
        return f"[{cells}] = {self.witness}" if self.witness else f"[{cells}]"


@dataclass(frozen=True)
class Closure:
    """Result of a closure search: functions in discovery order with witnesses."""

    carrier_size: int
    witnesses: Mapping[Ext, str]
    depths: Mapping[Ext, int]
    rounds: int
    saturated: bool

    def __len__(self) -> int:
        return len(self.witnesses)

    def __contains__(self, ext: object) -> bool:
        return ext in self.witnesses

    def __iter__(self) -> Iterator[Ext]:
        return iter(self.witnesses)

    @property
    def complete(self) -> bool:
        return len(self) == self.carrier_size**self.carrier_size

    def extensions(self) -> frozenset[Ext]:
        return frozenset(self.witnesses)


def clone_closure(
    size: int,
    unaries: Mapping[str, Sequence[int]] = {},
    binaries: Mapping[str, Sequence[Sequence[int]]] = {},
    max_depth: int = MAX_DEPTH,
) -> Closure:
    """Fixpoint of unary/pointwise-binary composition starting from the identity.

    Carrier elements are ``0..size-1``; ``unaries[name][i]`` is the image of
    ``i`` and ``binaries[name][i][j]`` the image of ``(i, j)``.
    """
    ident: Ext = tuple(range(size))
    witnesses: dict[Ext, str] = {ident: "x"}
    depths: dict[Ext, int] = {ident: 0}
    frontier = [ident]
    rounds = 0
    u_items = sorted(unaries.items())
    b_items = sorted(binaries.items())
    while frontier and rounds < max_depth:
        rounds += 1
        known = list(witnesses)
        fresh: list[Ext] = []

        def add(ext: Ext, term: str) -> None:
            if ext not in witnesses:
                witnesses[ext] = term
                depths[ext] = rounds
                fresh.append(ext)

        for f in frontier:
            for name, table in u_items:
                add(tuple(table[v] for v in f), f"{name}({witnesses[f]})")
        frontier_set = set(frontier)
        for name, table in b_items:
            for f in known:
                for g in known:
                    if f not in frontier_set and g not in frontier_set:
                        continue
                    add(tuple(table[a][b] for a, b in zip(f, g)), f"{name}({witnesses[f]}, {witnesses[g]})")
        frontier = fresh
    return Closure(size, witnesses, depths, rounds, saturated=not frontier)


def _as_indices(table_rows: Iterable[Iterable[Value]]) -> list[list[int]]:
    return [[CANONICAL.index(v) for v in row] for row in table_rows]


def unary_clone_closure(generators: Iterable[str], max_depth: int = MAX_DEPTH) -> Closure:
    """Clone closure of the named four-valued operators, restricted to one variable."""
    unaries: dict[str, list[int]] = {}
    binaries: dict[str, list[list[int]]] = {}
    for op in generators:
        if op not in OPERATORS:
            raise ConfigurationError(f"unknown operator {op!r}")
        table = OPERATORS[op]
        if Space.TARGET not in table.spaces:
            raise ConfigurationError(f"{op!r} is a policy-space combinator")
        if table.arity == 1:
            unaries[op] = [CANONICAL.index(v) for v in table.cells]
        else:
            binaries[op] = _as_indices(table.rows())
    return clone_closure(4, unaries, binaries, max_depth)


def closure_functions(closure: Closure) -> list[UnaryFunction4]:
    """The four-valued closure as :class:`UnaryFunction4` values, in discovery order."""
    return [
        UnaryFunction4(tuple(CANONICAL[i] for i in ext), closure.witnesses[ext], closure.depths[ext])
        for ext in closure
    ]


# Jobe's system uses the printed order 3, 2, 1 for rows and columns.
JOBE_VALUES = (3, 2, 1)


def _jobe_tables() -> tuple[list[list[int]], list[int], list[int]]:
    alphabet = tuple(str(v) for v in JOBE_VALUES)

    def idx(tok: str) -> int:
        return alphabet.index(tok)

    dot = [[idx(t) for t in row] for row in parse_grid(PRINTED_3["jobe_dot"], alphabet)]
    e1 = [idx(row[0]) for row in parse_grid(PRINTED_3["jobe_e1"], alphabet)]
    e2 = [idx(row[0]) for row in parse_grid(PRINTED_3["jobe_e2"], alphabet)]
    return dot, e1, e2


def jobe_apply(op: str, *args: int) -> int:
    """Evaluate Jobe's ``dot``, ``E1`` or ``E2`` on values from {3, 2, 1}."""
    dot, e1, e2 = _jobe_tables()
    pos = [JOBE_VALUES.index(a) for a in args]
    if op == "dot":
        return JOBE_VALUES[dot[pos[0]][pos[1]]]
    if op == "E1":
        return JOBE_VALUES[e1[pos[0]]]
    if op == "E2":
        return JOBE_VALUES[e2[pos[0]]]
    raise ConfigurationError(f"unknown Jobe operator {op!r}")


@dataclass(frozen=True)
class JobeReport:
    closure_size: int
    expected: int
    all_reachable: bool
    saturated: bool
    witnesses: dict[str, str]


def jobe_sanity_check() -> JobeReport:
    """Unary closure of Jobe's {dot, E1, E2}; all 27 functions is a necessary condition."""
    dot, e1, e2 = _jobe_tables()
    closure = clone_closure(3, {"E1": e1, "E2": e2}, {"dot": dot})
    shown = {
        "".join(str(JOBE_VALUES[i]) for i in ext): term for ext, term in closure.witnesses.items()
    }
    return JobeReport(
        closure_size=len(closure),
        expected=27,
        all_reachable=closure.complete,
        saturated=closure.saturated,
        witnesses=shown,
    )
