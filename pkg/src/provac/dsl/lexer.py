from __future__ import annotations

import re
from dataclasses import dataclass

from provac.errors import PolicySyntaxError


@dataclass(frozen=True)
class Token:
    kind: str
    text: str
    line: int
    column: int


_SPEC = [
    ("WS", r"[ \t\r]+"),
    ("NEWLINE", r"\n"),
    ("COMMENT", r"#[^\n]*"),
    ("STRING", r'"(?:[^"\\\n]|\\.)*"'),
    ("DATETIME", r"\d{4}-\d{2}-\d{2}T\d{2}:\d{2}:\d{2}Z"),
    ("DATE", r"\d{4}-\d{2}-\d{2}"),
    ("NUMBER", r"-?\d+(?:\.\d+)?(?:[eE][+-]?\d+)?"),
    ("WILD", r"\\v(?:\+|\{\d+\})"),
    ("VAR", r"\$[A-Za-z_][A-Za-z0-9_]*"),
    ("CONST", r"@[10BX]"),
    ("WORD", r"[A-Za-z_][A-Za-z0-9_]*"),
    ("ARROW", r"->"),
    ("OP", r"<=|>=|[<>=:;,()\[\]{}]"),
]
_MASTER = re.compile("|".join(f"(?P<{name}>{pattern})" for name, pattern in _SPEC))


def tokenize(text: str) -> list[Token]:
    tokens: list[Token] = []
    line, line_start, pos = 1, 0, 0
    while pos < len(text):
        m = _MASTER.match(text, pos)
        if m is None:
            raise PolicySyntaxError(f"unexpected character {text[pos]!r}", line, pos - line_start + 1)
        kind = m.lastgroup
        if kind == "NEWLINE":
            line += 1
            line_start = m.end()
        elif kind not in ("WS", "COMMENT"):
            tokens.append(Token(kind, m.group(), line, m.start() - line_start + 1))
        pos = m.end()
    tokens.append(Token("EOF", "", line, pos - line_start + 1))
    return tokens
