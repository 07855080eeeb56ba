"""The ``.ppol`` policy language."""

from provac.dsl.parser import PolicyDocument, parse, parse_expression
from provac.dsl.serializer import serialize

__all__ = ["PolicyDocument", "parse", "parse_expression", "serialize"]
