"""``provac`` command line: evaluate, validate, tables, verify, consistency-report."""

from __future__ import annotations

import argparse
import json
import sys
import time
from collections.abc import Sequence
from pathlib import Path

from provac import report
from provac.conditions import PERMIT, check_combiner, decide
from provac.dsl import PolicyDocument, parse
from provac.errors import GraphValidationError, ProvacError
from provac.graph import AliasTable, load_graph
from provac.lattice.fixtures import verify_fixtures
from provac.lattice.tables import PRINTED, SYMBOLS, parse_grid
from provac.lattice.values import CANONICAL, Value
from provac.targets import Request

EXIT_PERMIT, EXIT_DENY, EXIT_ERROR = 0, 1, 2


class UsageError(Exception):
    pass


def _read(path: str) -> str:
    try:
        return Path(path).read_text(encoding="utf-8")
    except OSError as exc:
        raise UsageError(f"cannot read {path}: {exc.strerror}") from None


def _load_json(path: str, what: str):
    try:
        return json.loads(_read(path))
    except json.JSONDecodeError as exc:
        raise UsageError(f"{path}: malformed {what} JSON: {exc}") from None


def load_request(path: str) -> Request:
    return Request.from_json(_load_json(path, "request"))


def load_aliases(path: str | None, doc: PolicyDocument) -> AliasTable:
    entries = {k: tuple(v) for k, v in doc.aliases.entries.items()}
    if path:
        raw = _load_json(path, "alias")
        if not isinstance(raw, dict):
            raise UsageError(f"{path}: alias file must map class names to patterns")
        for key, patterns in AliasTable.from_mapping(raw).entries.items():
            entries[key] = entries.get(key, ()) + patterns
    return AliasTable(entries)


def decision_report(decision, elapsed: float) -> dict:
    policies = []
    for r in sorted(decision.results, key=lambda r: r.policy):
        entry = {"id": r.policy, "applicable": r.applicable, "target": str(r.target)}
        if r.applicable:
            entry["condition"] = str(r.condition)
            entry["final"] = str(r.final)
        entry["trace"] = [rec.to_json() for rec in r.records]
        policies.append(entry)
    return {
        "outcome": decision.outcome,
        "combined": str(decision.combined) if decision.combined is not None else None,
        "applicable": sorted(decision.applicable),
        "policies": policies,
        "timing_ms": round(elapsed * 1000, 3),
    }


def cmd_evaluate(args: argparse.Namespace) -> int:
    check_combiner(args.combiner)
    g = load_graph(_read(args.graph))
    doc = parse(_read(args.policy))
    req = load_request(args.request)
    aliases = load_aliases(args.alias, doc)
    start = time.perf_counter()
    decision = decide(doc.policies, g, req, combiner=args.combiner, default=args.default, aliases=aliases)
    elapsed = time.perf_counter() - start
    if args.trace:
        Path(args.trace).write_text(decision.trace.to_jsonl(), encoding="utf-8")
    print(json.dumps(decision_report(decision, elapsed), ensure_ascii=False, indent=2))
    return EXIT_PERMIT if decision.outcome == PERMIT else EXIT_DENY


def _validate_one(path: str) -> list[str]:
    try:
        text = _read(path)
        if path.endswith(".ppol"):
            parse(text)
        elif path.endswith(".pgraph.json"):
            load_graph(text)
        elif path.endswith(".json"):
            Request.from_json(_load_json(path, "request"))
        else:
            return [f"{path}: unknown file type (expected .ppol, .pgraph.json or a request .json)"]
    except GraphValidationError as exc:
        return [f"{path}: {v.kind}: {v.message}" for v in exc.violations]
    except (ProvacError, UsageError) as exc:
        return [f"{path}: {exc}"]
    return []


def cmd_validate(args: argparse.Namespace) -> int:
    problems = []
    for path in args.files:
        found = _validate_one(path)
        problems.extend(found)
        print(f"{path}: {'ok' if not found else 'invalid'}")
    for line in problems:
        print(f"  {line}")
    return EXIT_ERROR if problems else 0


def render_table(name: str) -> str:
    """Rows labelled by the left input; binary grids get a column header."""
    grid = [[Value.from_token(tok) for tok in row] for row in parse_grid(PRINTED[name])]
    lines = [f"{name} ({SYMBOLS.get(name, name)})"]
    if len(grid[0]) > 1:
        lines.append("    | " + " ".join(v.symbol for v in CANONICAL))
    for label, row in zip(CANONICAL, grid):
        lines.append(f"  {label.symbol} | " + " ".join(v.symbol for v in row))
    return "\n".join(lines) + "\n"


def table_names() -> list[str]:
    return [n for n in PRINTED if not n.endswith("_printed") and not n.startswith("jobe4")]


def cmd_tables(args: argparse.Namespace) -> int:
    names = table_names()
    if args.operator:
        if args.operator not in names:
            raise UsageError(f"unknown table {args.operator!r}; choose from {', '.join(names)}")
        names = [args.operator]
    print(f"order: {' '.join(v.symbol for v in CANONICAL)}")
    for name in names:
        print(render_table(name))
    return 0


def _emit(items, title: str, as_json: bool) -> None:
    print(report.to_json(items) if as_json else report.render(items, title), end="")


def cmd_verify(args: argparse.Namespace) -> int:
    _emit(report.verification_report(), "Verification report", args.json)
    return 0


def cmd_consistency(args: argparse.Namespace) -> int:
    _emit(report.consistency_report(), "Consistency report", args.json)
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="provac", description="Provenance-based access control decisions.")
    sub = parser.add_subparsers(dest="command", required=True)

    ev = sub.add_parser("evaluate", help="decide a request against a graph and a policy file")
    ev.add_argument("graph", help="provenance graph (.pgraph.json)")
    ev.add_argument("policy", help="policy document (.ppol)")
    ev.add_argument("request", help="request JSON")
    ev.add_argument("--combiner", default="any", help="policy combiner (default: any)")
    ev.add_argument("--default", choices=("permit", "deny"), default="deny")
    ev.add_argument("--trace", metavar="OUT", help="write the evaluation trace as JSON lines")
    ev.add_argument("--alias", metavar="FILE", help="extra class-name aliases (JSON object)")
    ev.set_defaults(func=cmd_evaluate)

    va = sub.add_parser("validate", help="check graph, policy and request files")
    va.add_argument("files", nargs="+")
    va.set_defaults(func=cmd_validate)

    tb = sub.add_parser("tables", help="print truth tables")
    tb.add_argument("operator", nargs="?")
    tb.set_defaults(func=cmd_tables)

    for name, func, text in (
        ("verify", cmd_verify, "run the equivalence, closure and law checks"),
        ("consistency-report", cmd_consistency, "list conflicts among the printed tables"),
    ):
        p = sub.add_parser(name, help=text)
        p.add_argument("--json", action="store_true", help="machine-readable output")
        p.set_defaults(func=func)
    return parser


def main(argv: Sequence[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        verify_fixtures()
        return args.func(args)
    except (ProvacError, UsageError) as exc:
        print(f"provac: error: {exc}", file=sys.stderr)
        return EXIT_ERROR


if __name__ == "__main__":
    sys.exit(main())
