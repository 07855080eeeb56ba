"""The four decision values and the two spaces they live in."""

from __future__ import annotations

from dataclasses import dataclass
from enum import Enum, IntEnum

from provac.errors import ConfigurationError, SpaceMismatchError


class Value(IntEnum):
    """Decision values; the integer is the rank in the canonical order 1 > 0 > ⊥ > ×."""

    CROSS = 0
    BOT = 1
    ZERO = 2
    ONE = 3

    @property
    def token(self) -> str:
        return _TOKENS[self]

    @property
    def symbol(self) -> str:
        return _SYMBOLS[self]

    @classmethod
    def from_token(cls, token: str) -> Value:
        try:
            return _FROM_TOKEN[token.strip().upper()]
        except KeyError:
            raise ConfigurationError(f"unknown decision token {token!r}") from None


_TOKENS = {Value.ONE: "1", Value.ZERO: "0", Value.BOT: "B", Value.CROSS: "X"}
_SYMBOLS = {Value.ONE: "1", Value.ZERO: "0", Value.BOT: "⊥", Value.CROSS: "×"}
_FROM_TOKEN = {
    "1": Value.ONE,
    "0": Value.ZERO,
    "B": Value.BOT,
    "⊥": Value.BOT,
    "X": Value.CROSS,
    "×": Value.CROSS,
}

#: Row/column order used by every printed table.
CANONICAL: tuple[Value, ...] = (Value.ONE, Value.ZERO, Value.BOT, Value.CROSS)


def index_of(v: Value) -> int:
    """Position of ``v`` in :data:`CANONICAL`."""
    return 3 - int(v)


class Space(Enum):
    TARGET = "T"
    POLICY = "P"


@dataclass(frozen=True, slots=True)
class Decision4:
    value: Value
    space: Space = Space.TARGET

    def __str__(self) -> str:
        return f"{self.value.symbol}_{self.space.value}"

    @property
    def token(self) -> str:
        return f"{self.value.token}{self.space.value}"

    @classmethod
    def parse(cls, text: str) -> Decision4:
        """Parse ``"1T"``, ``"B_P"``, ``"×_T"`` and similar spellings."""
        raw = text.replace("_", "").strip()
        if len(raw) < 2:
            raise ConfigurationError(f"cannot parse decision {text!r}")
        try:
            space = Space(raw[-1].upper())
        except ValueError:
            raise ConfigurationError(f"cannot parse decision {text!r}") from None
        return cls(Value.from_token(raw[:-1]), space)

    def to_policy(self) -> Decision4:
        """One-to-one cast into the policy space (fresh patterns in conditions)."""
        return Decision4(self.value, Space.POLICY)


def same_space(*decisions: Decision4) -> Space:
    spaces = {d.space for d in decisions}
    if len(spaces) != 1:
        shown = ", ".join(str(d) for d in decisions)
        raise SpaceMismatchError(f"decisions from different spaces: {shown}")
    return spaces.pop()


def T(token: str) -> Decision4:
    return Decision4(Value.from_token(token), Space.TARGET)


def P(token: str) -> Decision4:
    return Decision4(Value.from_token(token), Space.POLICY)
