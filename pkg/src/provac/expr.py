"""Expression trees shared by target sections and condition sections."""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Union

from provac.lattice.values import Decision4, Value
from provac.targets import AtomicTarget


@dataclass(frozen=True)
class Atom:
    target: AtomicTarget


@dataclass(frozen=True)
class Ref:
    """A named declaration, or a free variable in an equivalence schema."""

    name: str
    pos: tuple[int, int] | None = field(default=None, compare=False, repr=False)


@dataclass(frozen=True)
class Const:
    value: Decision4


@dataclass(frozen=True)
class Unary:
    op: str
    child: Expr


@dataclass(frozen=True)
class Binary:
    op: str
    left: Expr
    right: Expr


@dataclass(frozen=True)
class Uary:
    op: str
    children: tuple[Expr, ...]

    def __post_init__(self) -> None:
        if not self.children:
            raise ValueError(f"{self.op}[...] needs at least one operand")


@dataclass(frozen=True)
class Transform:
    """Recast a target decision as a condition decision.

    ``prefix`` lists unary operators outermost first, so ``("opt", "not")``
    means ``~(¬t)``.  ``source`` is a :class:`Ref` to a target declaration or
    a fresh :class:`Atom`.
    """

    source: Expr
    direction: str
    tag: Value
    prefix: tuple[str, ...] = ()

    def __post_init__(self) -> None:
        if self.direction not in ("fwd", "rev"):
            raise ValueError(f"direction must be 'fwd' or 'rev', got {self.direction!r}")
        if len(self.prefix) > 4:
            raise ValueError("transformation prefixes are limited to depth 4")


Expr = Union[Atom, Ref, Const, Unary, Binary, Uary, Transform]


def children(e: Expr) -> tuple[Expr, ...]:
    if isinstance(e, Unary):
        return (e.child,)
    if isinstance(e, Binary):
        return (e.left, e.right)
    if isinstance(e, Uary):
        return e.children
    if isinstance(e, Transform):
        return (e.source,)
    return ()


def refs(e: Expr) -> list[Ref]:
    """Every :class:`Ref` in ``e`` in left-to-right order (transform sources included)."""
    found = []
    stack = [e]
    while stack:
        node = stack.pop()
        if isinstance(node, Ref):
            found.append(node)
        stack.extend(reversed(children(node)))
    return found


def depth(e: Expr) -> int:
    kids = children(e)
    return 1 + max((depth(k) for k in kids), default=0)
