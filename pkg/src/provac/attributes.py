"""Attribute values: strings, decimals, calendar days and UTC datetimes."""

from __future__ import annotations

import json
import re
from datetime import date, datetime, timezone
from decimal import Decimal, InvalidOperation
from enum import Enum
from typing import Union

AttributeValue = Union[str, Decimal, date, datetime]

_DATE_RE = re.compile(r"^\d{4}-\d{2}-\d{2}$")
_DATETIME_RE = re.compile(r"^\d{4}-\d{2}-\d{2}T\d{2}:\d{2}(:\d{2})?(\.\d+)?(Z|[+-]\d{2}:\d{2})?$")


class Predicate(Enum):
    EQ = "="
    LT = "<"
    LE = "<="
    GT = ">"
    GE = ">="


def tag_of(value: AttributeValue) -> str:
    # datetime subclasses date, so test it first
    if isinstance(value, datetime):
        return "datetime"
    if isinstance(value, date):
        return "date"
    if isinstance(value, Decimal):
        return "number"
    if isinstance(value, str):
        return "string"
    raise TypeError(f"unsupported attribute value {value!r}")


def parse_datetime(text: str) -> datetime:
    dt = datetime.fromisoformat(text.replace("Z", "+00:00"))
    if dt.tzinfo is None:
        dt = dt.replace(tzinfo=timezone.utc)
    return dt.astimezone(timezone.utc).replace(microsecond=0)


def from_json(raw: object) -> AttributeValue:
    """Decode a JSON attribute value.

    ISO-8601 strings become dates or datetimes; JSON numbers become decimals;
    any other string stays a string.
    """
    if isinstance(raw, bool):
        raise ValueError(f"boolean attribute values are not supported: {raw!r}")
    if isinstance(raw, (int, float)):
        return Decimal(str(raw))
    if isinstance(raw, str):
        if _DATE_RE.match(raw):
            try:
                return date.fromisoformat(raw)
            except ValueError:
                return raw
        if _DATETIME_RE.match(raw):
            try:
                return parse_datetime(raw)
            except ValueError:
                return raw
        return raw
    raise ValueError(f"unsupported attribute value {raw!r}")


def to_json(value: AttributeValue) -> object:
    tag = tag_of(value)
    if tag == "datetime":
        # isoformat pads years below 1000, strftime does not
        return value.astimezone(timezone.utc).replace(microsecond=0, tzinfo=None).isoformat() + "Z"
    if tag == "date":
        return value.isoformat()
    if tag == "number":
        if value == value.to_integral_value():
            return int(value)
        return float(value)
    return value


def to_literal(value: AttributeValue) -> str:
    """Spelling of a value inside the policy language."""
    tag = tag_of(value)
    if tag in ("date", "datetime"):
        return to_json(value)
    if tag == "number":
        return str(value)
    return json.dumps(value, ensure_ascii=False)


def parse_number(text: str) -> Decimal:
    try:
        return Decimal(text)
    except InvalidOperation:
        raise ValueError(f"not a number: {text!r}") from None


def compare(left: AttributeValue, pred: Predicate, right: AttributeValue) -> bool:
    """``left pred right``; values with different tags never satisfy a predicate."""
    if tag_of(left) != tag_of(right):
        return False
    if pred is Predicate.EQ:
        return left == right
    if pred is Predicate.LT:
        return left < right
    if pred is Predicate.LE:
        return left <= right
    if pred is Predicate.GT:
        return left > right
    return left >= right
