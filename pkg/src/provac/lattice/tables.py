"""Printed truth tables and the operators built from them.

Rows and columns of every grid follow :data:`~provac.lattice.values.CANONICAL`
(1, 0, ⊥, ×).  Tables are reproduced exactly as printed, including cells that
disagree with the order each operator is said to implement; see
:mod:`provac.report` for the list of such cells.
"""

from __future__ import annotations

from collections.abc import Sequence
from dataclasses import dataclass
from functools import reduce

from provac.errors import ConfigurationError, SpaceMismatchError
from provac.lattice.values import CANONICAL, Decision4, Space, Value, index_of, same_space

# Grids use the fixture token alphabet: 1, 0, B (⊥), X (×).
PRINTED: dict[str, tuple[str, ...]] = {
    # unary operators, one column each
    "not": ("0", "1", "B", "X"),
    "opt": ("1", "B", "0", "X"),
    "star": ("B", "X", "1", "0"),
    # binary target operators
    "sqcup": ("1 1 1 1", "1 0 0 0", "1 0 B B", "1 0 B X"),
    "sqcap": ("1 0 B X", "0 0 B X", "B B B X", "X X X X"),
    "cup": ("1 0 B X", "0 0 B X", "B B B B", "X X B X"),
    "cap": ("1 0 B X", "0 0 0 X", "B 0 B X", "X X X X"),
    "sqsubset": ("1 0 X B", "0 0 0 0", "B 0 B B", "X 0 B X"),
    "wedge": ("1 1 B X", "1 0 B X", "B B B X", "X X X X"),
    "vee": ("1 1 1 1", "1 0 B X", "1 B B X", "1 X X X"),
    "supset": ("1 0 B 1", "0 0 B 0", "B B B B", "1 0 B X"),
    "subset": ("1 1 1 1", "1 0 0 0", "1 0 B B", "1 0 B X"),
    "vdash": ("1 1 1 1", "1 0 0 0", "1 0 B X", "1 0 X X"),
    "dashv": ("1 0 B X", "0 0 0 X", "B 0 B X", "X X X X"),
    # order-aware policy combinators
    "oplus_cup": ("1 1 1 1", "0 0 0 0", "1 0 B B", "1 0 B X"),
    "oplus_cap": ("1 0 1 1", "1 0 0 0", "1 0 B B", "1 0 B X"),
    "rhd": ("1 1 1 1", "0 0 0 0", "1 0 B B", "1 0 B X"),
    "lhd": ("1 0 1 1", "1 0 0 0", "1 0 B B", "1 0 B X"),
    # target -> policy transformations; rows are t, columns are the tag
    "fwd": ("1 1 1 1", "1 0 0 0", "1 0 B B", "1 0 B X"),
    "rev": ("1 0 B X", "0 0 B X", "B B B X", "X X X X"),
    # finalizers
    "pbd": ("1", "1", "1", "X"),
    "dbd": ("1", "X", "X", "X"),
    # worked examples printed next to the transformation tables
    "opt_not_printed": ("0", "B", "1", "X"),
    "opt_not_fwd_printed": ("1 0 0 0", "1 0 B B", "1 1 1 1", "1 0 B X"),
    "opt_not_rev_printed": ("1 0 B B", "1 1 1 1", "1 0 0 0", "1 0 B X"),
    "star_not_star_printed": ("1", "0", "X", "B"),
    # four-valued counterpart of Jobe's operators
    "jobe4_dot": ("1 0 B X", "0 0 B X", "B B B X", "X X X 1"),
    "jobe4_e1": ("0", "1", "B", "X"),
    "jobe4_e2": ("1", "B", "0", "X"),
    "jobe4_e3": ("B", "X", "1", "0"),
}

# Jobe's three-valued system E, rows/columns in the printed order 3, 2, 1.
PRINTED_3: dict[str, tuple[str, ...]] = {
    "jobe_dot": ("3 2 1", "2 2 1", "1 1 1"),
    "jobe_e1": ("3", "1", "2"),
    "jobe_e2": ("1", "2", "3"),
}

UNARY_OPS = ("not", "opt", "star")
TARGET_BINARY_OPS = (
    "sqcup",
    "sqcap",
    "cup",
    "cap",
    "sqsubset",
    "wedge",
    "vee",
    "supset",
    "subset",
    "vdash",
    "dashv",
)
POLICY_COMBINATORS = ("oplus_cup", "oplus_cap", "rhd", "lhd")
UARY_OPS = ("any", "all")

SYMBOLS = {
    "not": "¬",
    "opt": "~",
    "star": "★",
    "sqcup": "⊔",
    "sqcap": "⊓",
    "cup": "∪",
    "cap": "∩",
    "sqsubset": "⊏",
    "wedge": "∧",
    "vee": "∨",
    "supset": "⊃",
    "subset": "⊂",
    "vdash": "⊢",
    "dashv": "⊣",
    "oplus_cup": "⊕∪",
    "oplus_cap": "⊕∩",
    "rhd": "▷",
    "lhd": "◁",
    "any": "△",
    "all": "▽",
    "fwd": "≺",
    "rev": "≻",
    "pbd": "pbd",
    "dbd": "dbd",
}


def parse_grid(rows: Sequence[str], alphabet: Sequence[str] = ("1", "0", "B", "X")) -> list[list[str]]:
    grid = [row.split() for row in rows]
    n = len(alphabet)
    if len(grid) != n:
        raise ConfigurationError(f"expected {n} rows, got {len(grid)}")
    widths = {len(r) for r in grid}
    if widths not in ({1}, {n}):
        raise ConfigurationError(f"rows must all have 1 or {n} cells, got widths {sorted(widths)}")
    for row in grid:
        for tok in row:
            if tok not in alphabet:
                raise ConfigurationError(f"bad token {tok!r}")
    return grid


@dataclass(frozen=True)
class OperatorTable:
    """A total truth table over the four decision values.

    ``cells`` is flat and row-major in canonical order; unary tables have
    four cells, binary tables sixteen.
    """

    name: str
    arity: int
    cells: tuple[Value, ...]
    spaces: frozenset[Space] = frozenset({Space.TARGET, Space.POLICY})

    def __post_init__(self) -> None:
        if self.arity not in (1, 2) or len(self.cells) != 4**self.arity:
            raise ConfigurationError(f"table {self.name!r} is not total")

    @property
    def symbol(self) -> str:
        return SYMBOLS.get(self.name, self.name)

    @classmethod
    def from_rows(cls, name: str, rows: Sequence[str], spaces=None) -> OperatorTable:
        grid = parse_grid(rows)
        cells = tuple(Value.from_token(tok) for row in grid for tok in row)
        arity = 1 if len(cells) == 4 else 2
        if spaces is None:
            return cls(name, arity, cells)
        return cls(name, arity, cells, frozenset(spaces))

    def value1(self, x: Value) -> Value:
        return self.cells[index_of(x)]

    def value2(self, a: Value, b: Value) -> Value:
        return self.cells[4 * index_of(a) + index_of(b)]

    def rows(self) -> list[list[Value]]:
        if self.arity == 1:
            return [[c] for c in self.cells]
        return [list(self.cells[4 * i : 4 * i + 4]) for i in range(4)]

    def as_grid_text(self) -> list[str]:
        return [" ".join(v.token for v in row) for row in self.rows()]

    def _check_space(self, space: Space) -> None:
        if space not in self.spaces:
            raise SpaceMismatchError(f"operator {self.name!r} is not defined in the {space.name.lower()} space")

    def __call__(self, *args: Decision4) -> Decision4:
        if len(args) != self.arity:
            raise TypeError(f"{self.name} takes {self.arity} argument(s), got {len(args)}")
        space = same_space(*args)
        self._check_space(space)
        if self.arity == 1:
            return Decision4(self.value1(args[0].value), space)
        return Decision4(self.value2(args[0].value, args[1].value), space)


def oplus(x: Value, y: Value, name: str = "oplus") -> OperatorTable:
    """The idempotent ⊕ family; ``x`` fills cell (1, 0) and ``y`` fills (0, 1)."""
    rows = [
        ["1", x.token, "1", "1"],
        [y.token, "0", "0", "0"],
        ["1", "0", "B", "B"],
        ["1", "0", "B", "X"],
    ]
    return OperatorTable.from_rows(name, [" ".join(r) for r in rows], spaces={Space.POLICY})


def _build() -> dict[str, OperatorTable]:
    tables = {}
    for name in UNARY_OPS + TARGET_BINARY_OPS:
        tables[name] = OperatorTable.from_rows(name, PRINTED[name])
    for name in POLICY_COMBINATORS:
        tables[name] = OperatorTable.from_rows(name, PRINTED[name], spaces={Space.POLICY})
    return tables


OPERATORS: dict[str, OperatorTable] = _build()


def get_operator(op: str) -> OperatorTable:
    try:
        return OPERATORS[op]
    except KeyError:
        raise ConfigurationError(f"unknown operator {op!r}") from None


def apply_unary(op: str, x: Decision4) -> Decision4:
    if op not in UNARY_OPS:
        raise ConfigurationError(f"unknown unary operator {op!r}")
    return OPERATORS[op](x)


def apply_binary(op: str, a: Decision4, b: Decision4) -> Decision4:
    table = get_operator(op)
    if table.arity != 2:
        raise ConfigurationError(f"{op!r} is not a binary operator")
    return table(a, b)


def apply_uary(op: str, xs: Sequence[Decision4]) -> Decision4:
    """△ (``any``) takes the highest value, ▽ (``all``) the lowest."""
    if op not in UARY_OPS:
        raise ConfigurationError(f"unknown u-ary operator {op!r}")
    if not xs:
        raise ValueError(f"{SYMBOLS[op]} needs at least one argument")
    space = same_space(*xs)
    pick = max if op == "any" else min
    return Decision4(pick(x.value for x in xs), space)


def fold_binary(op: str, xs: Sequence[Decision4]) -> Decision4:
    if not xs:
        raise ValueError("cannot fold an empty list")
    return reduce(lambda a, b: apply_binary(op, a, b), xs)


def min_under(order: Sequence[Value]) -> OperatorTable:
    """The "and" (lower of the two) under an arbitrary total order, highest first."""
    rank = {v: len(order) - i for i, v in enumerate(order)}
    rows = []
    for a in CANONICAL:
        rows.append(" ".join(min(a, b, key=rank.__getitem__).token for b in CANONICAL))
    return OperatorTable.from_rows("min", rows)
