"""Verification and consistency reports over the printed tables.

Every verdict here is computed by exhaustive enumeration; claims are
recorded next to the computed result instead of being assumed.
"""

from __future__ import annotations

import json
import time
from dataclasses import asdict, dataclass, field

from provac.algebra import check_equivalence
from provac.conditions import expressibility_scan, finalize, transform, transform_prefixed
from provac.expr import Binary, Expr, Ref, Uary, Unary
from provac.lattice.closure import jobe_sanity_check, unary_clone_closure
from provac.lattice.tables import (
    OPERATORS,
    PRINTED,
    SYMBOLS,
    TARGET_BINARY_OPS,
    apply_unary,
    min_under,
    parse_grid,
)
from provac.lattice.values import CANONICAL, Decision4, Space, Value

ONE, ZERO, BOT, CROSS = Value.ONE, Value.ZERO, Value.BOT, Value.CROSS

PASS, FLAG, INFO = "pass", "flag", "info"


@dataclass(frozen=True)
class Item:
    group: str
    label: str
    status: str
    detail: str
    data: dict = field(default_factory=dict)

    def line(self) -> str:
        return f"[{self.status.upper():4}] {self.group}: {self.label} -- {self.detail}"


def _t(name: str) -> Ref:
    return Ref(name)


def _un(op: str, e: Expr) -> Unary:
    return Unary(op, e)


def _bin(op: str, a: Expr, b: Expr) -> Binary:
    return Binary(op, a, b)


t, u, v, w = _t("t"), _t("t2"), _t("t3"), _t("t4")

# (label, left, right, claimed equal?)
CLAIMED_IDENTITIES: list[tuple[str, Expr, Expr, bool]] = [
    ("not(not t) = t", _un("not", _un("not", t)), t, True),
    ("opt(opt t) = opt t", _un("opt", _un("opt", t)), _un("opt", t), True),
    ("opt(not t) != not(opt t)", _un("opt", _un("not", t)), _un("not", _un("opt", t)), False),
    (
        "not(t sqcup t2) != (not t) sqcap (not t2)",
        _un("not", _bin("sqcup", t, u)),
        _bin("sqcap", _un("not", t), _un("not", u)),
        False,
    ),
    (
        "not(t sqcap t2) != (not t) sqcup (not t2)",
        _un("not", _bin("sqcap", t, u)),
        _bin("sqcup", _un("not", t), _un("not", u)),
        False,
    ),
    (
        "opt(t sqcup t2) = (opt t) sqcup (opt t2)",
        _un("opt", _bin("sqcup", t, u)),
        _bin("sqcup", _un("opt", t), _un("opt", u)),
        True,
    ),
    (
        "opt(t sqcap t2) = (opt t) sqcap (opt t2)",
        _un("opt", _bin("sqcap", t, u)),
        _bin("sqcap", _un("opt", t), _un("opt", u)),
        True,
    ),
    ("any[t, t2, t3] = t sqcup t2 sqcup t3", Uary("any", (t, u, v)), _bin("sqcup", _bin("sqcup", t, u), v), True),
    ("all[t, t2, t3] = t sqcap t2 sqcap t3", Uary("all", (t, u, v)), _bin("sqcap", _bin("sqcap", t, u), v), True),
    (
        "any[t, t2, t3, t4] = t sqcup t2 sqcup t3 sqcup t4",
        Uary("any", (t, u, v, w)),
        _bin("sqcup", _bin("sqcup", _bin("sqcup", t, u), v), w),
        True,
    ),
    (
        "all[t, t2, t3, t4] = t sqcap t2 sqcap t3 sqcap t4",
        Uary("all", (t, u, v, w)),
        _bin("sqcap", _bin("sqcap", _bin("sqcap", t, u), v), w),
        True,
    ),
]

# Orders under which each binary is described as the lower-of-two, highest first.
STATED_ORDERS: dict[str, tuple[Value, ...]] = {
    "cup": (ONE, ZERO, CROSS, BOT),
    "cap": (ONE, BOT, ZERO, CROSS),
    "sqsubset": (ONE, CROSS, BOT, ZERO),
    "wedge": (ZERO, ONE, BOT, CROSS),
    "vee": (ZERO, CROSS, BOT, ONE),
    "supset": (CROSS, ONE, ZERO, BOT),
    "subset": (CROSS, BOT, ZERO, ONE),
    "vdash": (BOT, CROSS, ZERO, ONE),
    "dashv": (CROSS, ONE, ZERO, BOT),
}


def _order_text(order: tuple[Value, ...]) -> str:
    return ">".join(x.symbol for x in order)


def _grid_values(name: str) -> list[list[Value]]:
    return [[Value.from_token(tok) for tok in row] for row in parse_grid(PRINTED[name])]


def _column(name: str) -> tuple[Value, ...]:
    return tuple(row[0] for row in _grid_values(name))


def _cells(name: str) -> tuple[Value, ...]:
    return tuple(x for row in _grid_values(name) for x in row)


def _ext_text(values) -> str:
    return " ".join(x.symbol for x in values)


# -- verification ------------------------------------------------------------


def equivalence_items() -> list[Item]:
    items = []
    for label, left, right, claimed in CLAIMED_IDENTITIES:
        res = check_equivalence(left, right)
        consistent = res.equivalent == claimed
        if res.equivalent:
            detail = f"equivalent ({res.agreeing}/{res.cases})"
        else:
            detail = f"counterexample found: {res}"
        items.append(
            Item(
                "equivalence",
                label,
                PASS if consistent else FLAG,
                detail if consistent else f"{detail}; claimed {'equal' if claimed else 'different'}",
                {"equivalent": res.equivalent, "cases": res.cases, "agreeing": res.agreeing, "claimed": claimed},
            )
        )
    return items


def closure_items() -> list[Item]:
    items = []
    start = time.perf_counter()
    closure = unary_clone_closure(["not", "opt", "star", "cup"])
    elapsed = time.perf_counter() - start
    items.append(
        Item(
            "closure",
            "unary clone of {not, opt, star, cup}",
            PASS if closure.complete else FLAG,
            f"{len(closure)}/256 unary functions, saturated={closure.saturated} after {closure.rounds} rounds",
            {"size": len(closure), "saturated": closure.saturated, "rounds": closure.rounds, "seconds": elapsed},
        )
    )
    only_not = unary_clone_closure(["not"])
    items.append(
        Item(
            "closure",
            "unary clone of {not}",
            PASS if len(only_not) == 2 else FLAG,
            f"size {len(only_not)}: " + ", ".join(only_not.witnesses.values()),
            {"size": len(only_not)},
        )
    )
    jobe = jobe_sanity_check()
    items.append(
        Item(
            "closure",
            "three-valued {dot, E1, E2} unary clone",
            PASS if jobe.all_reachable else FLAG,
            f"{jobe.closure_size}/{jobe.expected} reachable",
            {"size": jobe.closure_size},
        )
    )
    return items


def expressibility_items() -> list[Item]:
    items = []
    for ops in (("not", "opt"), ("not", "opt", "star")):
        rep = expressibility_scan(ops, 4)
        items.append(
            Item(
                "expressibility",
                f"prefixed transformations over {{{', '.join(ops)}}} (depth <= 4)",
                PASS if rep.complete else FLAG,
                f"{rep.count}/256 target-to-policy maps reachable; claimed all",
                {"count": rep.count},
            )
        )
    return items


def law_items() -> list[Item]:
    items = []
    star4 = all(
        apply_unary("star", apply_unary("star", apply_unary("star", apply_unary("star", Decision4(x))))).value is x
        for x in CANONICAL
    )
    items.append(Item("laws", "star applied four times is the identity", PASS if star4 else FLAG, str(star4)))
    star2 = all(apply_unary("star", apply_unary("star", Decision4(x))).value is x for x in CANONICAL)
    items.append(Item("laws", "star is an involution", INFO, str(star2)))
    fwd_x = all(transform(Decision4(x), "fwd", CROSS).value is x for x in CANONICAL)
    rev_1 = all(transform(Decision4(x), "rev", ONE).value is x for x in CANONICAL)
    items.append(Item("laws", "fwd with tag × embeds targets unchanged", PASS if fwd_x else FLAG, str(fwd_x)))
    items.append(Item("laws", "rev with tag 1 embeds targets unchanged", PASS if rev_1 else FLAG, str(rev_1)))
    outs = {finalize(Decision4(x, Space.POLICY), m).value for x in CANONICAL for m in ("pbd", "dbd")}
    items.append(
        Item("laws", "finalizers output only 1 or ×", PASS if outs <= {ONE, CROSS} else FLAG, _ext_text(sorted(outs)))
    )
    for op in TARGET_BINARY_OPS:
        table = OPERATORS[op]
        pairs = [(a, b) for a in CANONICAL for b in CANONICAL]
        comm = all(table.value2(a, b) == table.value2(b, a) for a, b in pairs)
        assoc = all(
            table.value2(table.value2(a, b), c) == table.value2(a, table.value2(b, c))
            for a in CANONICAL
            for b in CANONICAL
            for c in CANONICAL
        )
        idem = all(table.value2(a, a) == a for a in CANONICAL)
        items.append(
            Item(
                "laws",
                f"{op} ({SYMBOLS[op]})",
                INFO,
                f"commutative={comm} associative={assoc} idempotent={idem}",
                {"commutative": comm, "associative": assoc, "idempotent": idem},
            )
        )
    return items


def verification_report() -> list[Item]:
    return equivalence_items() + closure_items() + expressibility_items() + law_items()


# -- consistency -------------------------------------------------------------


def _duplicate(a: str, b: str) -> Item:
    same = _cells(a) == _cells(b)
    return Item(
        "duplicate-table",
        f"{a} ({SYMBOLS[a]}) vs {b} ({SYMBOLS[b]})",
        FLAG if same else PASS,
        "printed grids are identical" if same else "printed grids differ",
    )


def _order_items() -> list[Item]:
    items = []
    seen: dict[tuple[Value, ...], str] = {}
    for op, order in STATED_ORDERS.items():
        expected = min_under(order)
        actual = OPERATORS[op]
        diffs = [
            f"({a.symbol},{b.symbol}) printed {actual.value2(a, b).symbol} expected {expected.value2(a, b).symbol}"
            for a in CANONICAL
            for b in CANONICAL
            if actual.value2(a, b) != expected.value2(a, b)
        ]
        detail = f"order {_order_text(order)}: " + (
            f"{len(diffs)} cell(s) differ: " + "; ".join(diffs) if diffs else "all 16 cells agree"
        )
        items.append(Item("stated-order", f"{op} ({SYMBOLS[op]})", FLAG if diffs else PASS, detail, {"diffs": len(diffs)}))
        if order in seen:
            items.append(
                Item(
                    "stated-order",
                    f"{op} order repeats {seen[order]}",
                    FLAG,
                    f"both described by {_order_text(order)}",
                )
            )
        seen.setdefault(order, op)
    return items


def _prose_combinator(emphasis: str):
    """Order-aware combinator as described in words: a decided input (1 or 0) wins."""

    def f(a: Value, b: Value) -> Value:
        first, second = (a, b) if emphasis == "first" else (b, a)
        return first if first in (ONE, ZERO) else second

    return f


def _combinator_items() -> list[Item]:
    items = [_duplicate("rhd", "oplus_cup"), _duplicate("lhd", "oplus_cap")]
    for op, emphasis in (("rhd", "first"), ("lhd", "second")):
        f = _prose_combinator(emphasis)
        table = OPERATORS[op]
        diffs = [
            f"({a.symbol},{b.symbol}) printed {table.value2(a, b).symbol} described {f(a, b).symbol}"
            for a in CANONICAL
            for b in CANONICAL
            if table.value2(a, b) != f(a, b)
        ]
        items.append(
            Item(
                "combinator-prose",
                f"{op} emphasises the {emphasis} input",
                FLAG if diffs else PASS,
                "; ".join(diffs) if diffs else "all 16 cells agree",
            )
        )
    return items


def _finalizer_items() -> list[Item]:
    items = []
    for mode in ("pbd", "dbd"):
        col = _column(mode)
        # described behaviour: pbd permits unless ×, dbd permits only 1; the fallback is ⊥
        if mode == "pbd":
            described = tuple(ONE if x is not CROSS else BOT for x in CANONICAL)
        else:
            described = tuple(ONE if x is ONE else BOT for x in CANONICAL)
        diffs = [
            f"{x.symbol}_P printed {c.symbol} described {d.symbol}"
            for x, c, d in zip(CANONICAL, col, described)
            if c != d
        ]
        items.append(
            Item(
                "finalizer",
                f"{mode} fallback value",
                FLAG if diffs else PASS,
                ("table uses × where the description uses ⊥: " + "; ".join(diffs)) if diffs else "agrees",
            )
        )
    return items


def _composition_items() -> list[Item]:
    items = []
    composed = tuple(apply_unary("opt", apply_unary("not", Decision4(x))).value for x in CANONICAL)
    printed = _column("opt_not_printed")
    items.append(
        Item(
            "printed-example",
            "opt(not t) column",
            FLAG if composed != printed else PASS,
            f"printed {_ext_text(printed)}; composed {_ext_text(composed)}",
        )
    )
    for direction in ("fwd", "rev"):
        name = f"opt_not_{direction}_printed"
        grid = _grid_values(name)
        diffs = 0
        for i, x in enumerate(CANONICAL):
            for j, tag in enumerate(CANONICAL):
                got = transform_prefixed(Decision4(x), ("opt", "not"), direction, tag).value
                diffs += got != grid[i][j]
        items.append(
            Item(
                "printed-example",
                f"opt(not t) {direction} grid",
                FLAG if diffs else PASS,
                f"{diffs}/16 cells differ from composition",
                {"diffs": diffs},
            )
        )
        via_printed = 0
        for i, x in enumerate(CANONICAL):
            for j, tag in enumerate(CANONICAL):
                via_printed += transform(Decision4(printed[i]), direction, tag).value != grid[i][j]
        items.append(
            Item(
                "printed-example",
                f"opt(not t) {direction} grid vs printed column",
                FLAG if via_printed else PASS,
                f"{via_printed}/16 cells differ when the printed column is fed to the transformation",
            )
        )
    star = tuple(
        apply_unary("star", apply_unary("not", apply_unary("star", Decision4(x)))).value for x in CANONICAL
    )
    printed_star = _column("star_not_star_printed")
    items.append(
        Item(
            "printed-example",
            "star(not(star t)) column",
            FLAG if star != printed_star else PASS,
            f"printed {_ext_text(printed_star)}; composed {_ext_text(star)}",
        )
    )
    return items


def _jobe4_items() -> list[Item]:
    dot = _cells("jobe4_dot")
    meet = _cells("sqcap")
    diffs = [
        f"({a.symbol},{b.symbol}) {dot[i * 4 + j].symbol} vs {meet[i * 4 + j].symbol}"
        for i, a in enumerate(CANONICAL)
        for j, b in enumerate(CANONICAL)
        if dot[i * 4 + j] != meet[i * 4 + j]
    ]
    items = [
        Item(
            "four-valued-analog",
            "dot vs sqcap",
            FLAG if diffs else PASS,
            ("differs at " + "; ".join(diffs)) if diffs else "identical",
        )
    ]
    for name, op in (("jobe4_e1", "not"), ("jobe4_e2", "opt"), ("jobe4_e3", "star")):
        same = _column(name) == _cells(op)
        items.append(
            Item("four-valued-analog", f"{name[6:].upper()} vs {op}", PASS if same else FLAG, "identical" if same else "differs")
        )
    return items


def consistency_report() -> list[Item]:
    """Internal conflicts among the printed artifacts, computed on every run."""
    items = [_duplicate("subset", "sqcup"), _duplicate("dashv", "cap")]
    items += _order_items()
    items += _combinator_items()
    items += _finalizer_items()
    items += _composition_items()
    items += [i for i in equivalence_items() if i.status == FLAG]
    items += [i for i in expressibility_items() if i.status == FLAG]
    items += _jobe4_items()
    return items


def render(items: list[Item], title: str) -> str:
    flagged = sum(1 for i in items if i.status == FLAG)
    lines = [title, "=" * len(title)]
    lines += [i.line() for i in items]
    lines.append(f"{len(items)} items, {flagged} flagged")
    return "\n".join(lines) + "\n"


def to_json(items: list[Item]) -> str:
    rows = []
    for i in items:
        row = asdict(i)
        row["data"] = {k: v for k, v in row["data"].items() if k != "seconds"}
        rows.append(row)
    return json.dumps(rows, ensure_ascii=False, indent=2) + "\n"
