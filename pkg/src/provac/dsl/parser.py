"""Recursive-descent parser for ``.ppol`` policy documents.

Precedence: unary operators bind tighter than binary ones, all binary
operators share one level and associate to the left, and parentheses group.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from datetime import date

from provac import attributes as attrs
from provac.attributes import AttributeValue, Predicate
from provac.conditions import Policy
from provac.errors import PolicyDefinitionError, PolicySyntaxError
from provac.expr import Atom, Binary, Const, Expr, Ref, Transform, Uary, Unary, refs
from provac.graph import AliasTable, VertexType
from provac.lattice.tables import POLICY_COMBINATORS, TARGET_BINARY_OPS, UARY_OPS, UNARY_OPS
from provac.lattice.values import Decision4, Space, Value
from provac.dsl.lexer import Token, tokenize
from provac.targets import (
    Exactly,
    NullTarget,
    PathPattern,
    PathTarget,
    Plus,
    Quaternion,
    RequestTarget,
    SingleTarget,
)

VERTEX_TYPES = ("agent", "artifact", "process")
PREDICATES = {"=": Predicate.EQ, ":": Predicate.EQ, "<": Predicate.LT, "<=": Predicate.LE, ">": Predicate.GT, ">=": Predicate.GE}
TAGS = {"1": Value.ONE, "0": Value.ZERO, "B": Value.BOT, "X": Value.CROSS}

KEYWORDS = frozenset(
    {
        *UNARY_OPS,
        *TARGET_BINARY_OPS,
        *POLICY_COMBINATORS,
        *UARY_OPS,
        *VERTEX_TYPES,
        "null",
        "path",
        "request",
        "causal",
        "target",
        "condition",
        "finalize",
        "policy",
        "alias",
        "version",
        "id",
        "fwd",
        "rev",
        "pbd",
        "dbd",
        "none",
    }
)


@dataclass(frozen=True)
class PolicyDocument:
    version: int = 1
    id: str | None = None
    aliases: AliasTable = field(default_factory=AliasTable)
    policies: tuple[Policy, ...] = ()

    def policy(self, policy_id: str) -> Policy:
        for p in self.policies:
            if p.id == policy_id:
                return p
        raise KeyError(policy_id)


class Parser:
    def __init__(self, text: str) -> None:
        self.tokens = tokenize(text)
        self.i = 0

    # -- token helpers --

    @property
    def tok(self) -> Token:
        return self.tokens[self.i]

    def peek(self, offset: int = 1) -> Token:
        return self.tokens[min(self.i + offset, len(self.tokens) - 1)]

    def error(self, message: str, tok: Token | None = None) -> PolicySyntaxError:
        tok = tok or self.tok
        return PolicySyntaxError(message, tok.line, tok.column)

    def at(self, text: str) -> bool:
        return self.tok.kind in ("OP", "WORD", "ARROW") and self.tok.text == text

    def advance(self) -> Token:
        tok = self.tok
        self.i += 1
        return tok

    def expect(self, text: str) -> Token:
        if not self.at(text):
            found = self.tok.text or "end of input"
            raise self.error(f"expected {text!r}, found {found!r}")
        return self.advance()

    def expect_kind(self, kind: str, what: str) -> Token:
        if self.tok.kind != kind:
            found = self.tok.text or "end of input"
            raise self.error(f"expected {what}, found {found!r}")
        return self.advance()

    def name(self, what: str = "a name") -> str:
        """An identifier or quoted string (vertex names, attribute keys)."""
        if self.tok.kind == "WORD":
            return self.advance().text
        if self.tok.kind == "STRING":
            return json.loads(self.advance().text)
        raise self.error(f"expected {what}, found {self.tok.text or 'end of input'!r}")

    def ident(self, what: str) -> Token:
        tok = self.expect_kind("WORD", what)
        if tok.text in KEYWORDS:
            raise self.error(f"{tok.text!r} is a reserved word", tok)
        return tok

    # -- document --

    def document(self) -> PolicyDocument:
        version = 1
        doc_id = None
        aliases: dict[str, tuple[str, ...]] = {}
        policies: list[Policy] = []
        seen: dict[str, Token] = {}
        if self.at("version"):
            self.advance()
            self.expect(":")
            tok = self.expect_kind("NUMBER", "a version number")
            if tok.text != "1":
                raise self.error(f"unsupported policy language version {tok.text}", tok)
            self.expect(";")
        while self.tok.kind != "EOF":
            if self.at("id"):
                self.advance()
                self.expect(":")
                doc_id = json.loads(self.expect_kind("STRING", "a quoted document id").text)
                self.expect(";")
            elif self.at("alias"):
                self.advance()
                key = self.name("a class name")
                self.expect("=")
                patterns = [json.loads(self.expect_kind("STRING", "a quoted alias pattern").text)]
                while self.at(","):
                    self.advance()
                    patterns.append(json.loads(self.expect_kind("STRING", "a quoted alias pattern").text))
                self.expect(";")
                aliases[key] = aliases.get(key, ()) + tuple(patterns)
            elif self.at("policy"):
                start = self.tok
                policy = self.policy()
                if policy.id in seen:
                    raise PolicyDefinitionError(f"duplicate policy id {policy.id!r}", start.line, start.column)
                seen[policy.id] = start
                policies.append(policy)
            else:
                raise self.error(f"expected 'policy', 'alias' or 'id', found {self.tok.text!r}")
        return PolicyDocument(version, doc_id, AliasTable(aliases), tuple(policies))

    def policy(self) -> Policy:
        open_tok = self.expect("policy")
        pid = self.name("a policy id")
        self.expect("{")
        target_root: Expr | None = None
        condition_root: Expr | None = None
        finalizer = "none"
        target_decls: list[tuple[str, Expr]] = []
        condition_decls: list[tuple[str, Expr]] = []
        declared: dict[str, str] = {}

        def declare(tok: Token, kind: str) -> None:
            if tok.text in declared:
                raise PolicyDefinitionError(f"{tok.text!r} is already declared", tok.line, tok.column)
            declared[tok.text] = kind

        while not self.at("}"):
            if self.tok.kind == "EOF":
                raise self.error("unterminated policy block")
            if self.at("target") and self.peek().text == ":":
                self.advance()
                self.advance()
                target_root = self.expr(Space.TARGET)
                self.expect(";")
            elif self.at("target"):
                self.advance()
                tok = self.ident("a target name")
                declare(tok, "target")
                self.expect("=")
                target_decls.append((tok.text, self.expr(Space.TARGET)))
                self.expect(";")
            elif self.at("condition") and self.peek().text == ":":
                self.advance()
                self.advance()
                condition_root = self.expr(Space.POLICY)
                self.expect(";")
            elif self.at("condition"):
                self.advance()
                tok = self.ident("a condition name")
                declare(tok, "condition")
                self.expect("=")
                condition_decls.append((tok.text, self.expr(Space.POLICY)))
                self.expect(";")
            elif self.at("finalize"):
                self.advance()
                self.expect(":")
                tok = self.expect_kind("WORD", "pbd, dbd or none")
                if tok.text not in ("pbd", "dbd", "none"):
                    raise self.error(f"unknown finalizer {tok.text!r}", tok)
                finalizer = tok.text
                self.expect(";")
            else:
                name_tok, transform = self.transform_decl()
                declare(name_tok, "condition")
                condition_decls.append((name_tok.text, transform))
        self.expect("}")
        if condition_root is None:
            raise PolicyDefinitionError(f"policy {pid!r} has no 'condition:' section", open_tok.line, open_tok.column)
        policy = Policy(
            pid,
            target_root if target_root is not None else Atom(NullTarget()),
            condition_root,
            finalizer,
            tuple(target_decls),
            tuple(condition_decls),
        )
        check_references(policy)
        return policy

    def transform_decl(self) -> tuple[Token, Transform]:
        prefix: list[str] = []
        while self.tok.kind == "WORD" and self.tok.text in UNARY_OPS:
            prefix.append(self.advance().text)
        if len(prefix) > 4:
            raise self.error("transformation prefixes are limited to depth 4")
        if self.tok.kind == "WORD" and self.tok.text not in KEYWORDS:
            tok = self.advance()
            source: Expr = Ref(tok.text, (tok.line, tok.column))
        elif self.tok.kind == "WORD" and (self.tok.text in ("null", "path", "request", *VERTEX_TYPES)):
            source = Atom(self.atomic())
        else:
            raise self.error(f"expected a declaration, found {self.tok.text or 'end of input'!r}")
        if not (self.at("fwd") or self.at("rev")):
            raise self.error(f"expected 'fwd' or 'rev', found {self.tok.text or 'end of input'!r}")
        direction = self.advance().text
        self.expect("(")
        tag_tok = self.advance()
        if tag_tok.text not in TAGS:
            raise self.error(f"expected a tag 1, 0, B or X, found {tag_tok.text!r}", tag_tok)
        self.expect(")")
        self.expect("->")
        name_tok = self.ident("a condition name")
        self.expect(";")
        return name_tok, Transform(source, direction, TAGS[tag_tok.text], tuple(prefix))

    # -- expressions --

    def binary_op(self, space: Space) -> str | None:
        tok = self.tok
        if tok.kind == "OP" and tok.text in (";", ")", "]", ","):
            return None
        if tok.kind == "EOF":
            return None
        if tok.kind == "WORD" and tok.text in TARGET_BINARY_OPS:
            return tok.text
        if tok.kind == "WORD" and tok.text in POLICY_COMBINATORS:
            if space is Space.TARGET:
                raise self.error(f"operator {tok.text!r} is only defined for conditions")
            return tok.text
        if tok.kind == "WORD":
            raise self.error(f"unknown operator {tok.text!r}")
        raise self.error(f"expected an operator or ';', found {tok.text!r}")

    def expr(self, space: Space) -> Expr:
        left = self.unary(space)
        while (op := self.binary_op(space)) is not None:
            self.advance()
            left = Binary(op, left, self.unary(space))
        return left

    def unary(self, space: Space) -> Expr:
        if self.tok.kind == "WORD" and self.tok.text in UNARY_OPS:
            op = self.advance().text
            return Unary(op, self.unary(space))
        return self.primary(space)

    def primary(self, space: Space) -> Expr:
        tok = self.tok
        if self.at("("):
            self.advance()
            inner = self.expr(space)
            self.expect(")")
            return inner
        if tok.kind == "WORD" and tok.text in UARY_OPS:
            self.advance()
            self.expect("[")
            items = [self.expr(space)]
            while self.at(","):
                self.advance()
                items.append(self.expr(space))
            self.expect("]")
            return Uary(tok.text, tuple(items))
        if tok.kind == "CONST":
            if space is Space.TARGET:
                raise self.error("decision constants are only allowed in conditions")
            self.advance()
            return Const(Decision4(Value.from_token(tok.text[1:]), Space.POLICY))
        if tok.kind == "WORD" and tok.text in ("null", "path", "request", *VERTEX_TYPES):
            return Atom(self.atomic())
        if tok.kind == "WORD" and tok.text not in KEYWORDS:
            self.advance()
            return Ref(tok.text, (tok.line, tok.column))
        if tok.kind == "WORD":
            raise self.error(f"unexpected keyword {tok.text!r}")
        raise self.error(f"expected an expression, found {tok.text or 'end of input'!r}")

    # -- atomic targets --

    def atomic(self):
        tok = self.tok
        if self.at("null"):
            self.advance()
            return NullTarget()
        if self.at("path"):
            return PathTarget(self.path())
        if self.at("request"):
            self.advance()
            self.expect("[")
            var = self.expect_kind("VAR", "a $request attribute")
            pred = self.predicate()
            value = self.literal()
            self.expect("]")
            return RequestTarget(var.text[1:], value, pred)
        if tok.kind == "WORD" and tok.text in VERTEX_TYPES:
            return SingleTarget(self.quaternion())
        raise self.error(f"expected an atomic target, found {tok.text!r}")

    def path(self) -> PathPattern:
        start = self.expect("path")
        self.expect("(")
        elements = [self.path_element()]
        reverse = False
        while self.at(","):
            self.advance()
            if self.at("causal"):
                self.advance()
                self.expect(":")
                mode = self.expect_kind("WORD", "'forward' or 'reverse'")
                if mode.text not in ("forward", "reverse"):
                    raise self.error(f"unknown causal direction {mode.text!r}", mode)
                reverse = mode.text == "reverse"
                break
            elements.append(self.path_element())
        self.expect(")")
        try:
            return PathPattern(tuple(elements), reverse)
        except ValueError as exc:
            raise self.error(str(exc), start) from None

    def path_element(self):
        if self.tok.kind == "WILD":
            text = self.advance().text
            if text == "\\v+":
                return Plus()
            count = int(text[3:-1])
            if count < 1:
                raise self.error("\\v{k} needs k >= 1")
            return Exactly(count)
        return self.quaternion()

    def quaternion(self) -> Quaternion:
        vt = self.expect_kind("WORD", "a vertex type")
        if vt.text not in VERTEX_TYPES:
            raise self.error(f"unknown vertex type {vt.text!r}", vt)
        self.expect(":")
        vname = self.name("a vertex class name")
        if not self.at("["):
            return Quaternion(VertexType(vt.text), vname)
        self.advance()
        key = self.name("an attribute key")
        pred = self.predicate()
        if self.tok.kind == "VAR":
            binding = self.advance().text[1:]
            self.expect("]")
            return Quaternion(VertexType(vt.text), vname, key, binding=binding, pred=pred)
        value = self.literal()
        self.expect("]")
        return Quaternion(VertexType(vt.text), vname, key, value=value, pred=pred)

    def predicate(self) -> Predicate:
        if self.tok.kind == "OP" and self.tok.text in PREDICATES:
            return PREDICATES[self.advance().text]
        raise self.error(f"expected a predicate (=, <, <=, >, >=), found {self.tok.text!r}")

    def literal(self) -> AttributeValue:
        tok = self.tok
        if tok.kind == "STRING":
            self.advance()
            return json.loads(tok.text)
        if tok.kind == "NUMBER":
            self.advance()
            return attrs.parse_number(tok.text)
        if tok.kind == "DATE":
            self.advance()
            try:
                return date.fromisoformat(tok.text)
            except ValueError:
                raise self.error(f"invalid date {tok.text!r}", tok) from None
        if tok.kind == "DATETIME":
            self.advance()
            try:
                return attrs.parse_datetime(tok.text)
            except ValueError:
                raise self.error(f"invalid datetime {tok.text!r}", tok) from None
        raise self.error(f"expected a value, found {tok.text or 'end of input'!r}")


def _positioned(ref: Ref) -> tuple[int, int]:
    return ref.pos or (0, 0)


def check_references(policy: Policy) -> None:
    """Raise for the first (in source order) undeclared or miscategorised name."""
    targets = dict(policy.target_decls)
    conditions = dict(policy.condition_decls)
    problems: list[tuple[tuple[int, int], str]] = []

    def scan(expr: Expr, allowed: dict[str, Expr], kind: str) -> None:
        for ref in refs(expr):
            if ref.name not in allowed:
                other = "condition" if kind == "target" else "target"
                if ref.name in (conditions if kind == "target" else targets):
                    why = f"{ref.name!r} is a {other}, not a {kind}"
                else:
                    why = f"unresolved reference {ref.name!r}"
                problems.append((_positioned(ref), why))

    for _, body in policy.target_decls:
        scan(body, targets, "target")
    scan(policy.target, targets, "target")
    for _, body in policy.condition_decls:
        if isinstance(body, Transform):
            scan(body.source, targets, "target")
        else:
            scan(body, conditions, "condition")
    scan(policy.condition, conditions, "condition")
    if problems:
        (line, col), why = min(problems)
        raise PolicyDefinitionError(why, line, col)

    for decls in (targets, conditions):
        _check_acyclic(decls)


def _check_acyclic(decls: dict[str, Expr]) -> None:
    state: dict[str, int] = {}

    def visit(name: str, via: Ref | None) -> None:
        if state.get(name) == 2:
            return
        if state.get(name) == 1:
            line, col = _positioned(via) if via else (0, 0)
            raise PolicyDefinitionError(f"declaration {name!r} refers to itself", line, col)
        state[name] = 1
        body = decls[name]
        if not isinstance(body, Transform):
            for ref in refs(body):
                if ref.name in decls:
                    visit(ref.name, ref)
        state[name] = 2

    for name in decls:
        visit(name, None)


def parse(text: str) -> PolicyDocument:
    parser = Parser(text)
    return parser.document()


def parse_expression(text: str, space: Space = Space.TARGET) -> Expr:
    """Parse a standalone expression; names stay unresolved :class:`Ref` nodes."""
    parser = Parser(text)
    e = parser.expr(space)
    if parser.tok.kind != "EOF":
        raise parser.error(f"unexpected {parser.tok.text!r} after expression")
    return e
