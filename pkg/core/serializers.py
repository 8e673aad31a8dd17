"""
Exact JSON rendering.

Every rational leaves the process as an exact "p/q" string (integers stay
JSON integers); no float is ever written.
"""

import json
from enum import Enum
from fractions import Fraction
from typing import Any

from django.core.serializers.json import DjangoJSONEncoder
from sympy import Integer, MatrixBase, Rational


def format_rational(value: Any) -> str:
    if isinstance(value, Rational):
        value = Fraction(int(value.p), int(value.q))
    value = Fraction(value)
    if value.denominator == 1:
        return str(value.numerator)
    return f"{value.numerator}/{value.denominator}"


def parse_rational(text: Any) -> Fraction:
    """Parse an int or a "p/q" string; floats are rejected."""
    if isinstance(text, (bool, float)):
        raise ValueError(f"not an exact rational: {text!r}")
    if isinstance(text, int):
        return Fraction(text)
    try:
        return Fraction(str(text).strip())
    except (ValueError, ZeroDivisionError) as exc:
        raise ValueError(f"not an exact rational: {text!r}") from exc


class ExactJSONEncoder(DjangoJSONEncoder):
    def default(self, o):
        if isinstance(o, Integer):
            return int(o)
        if isinstance(o, (Fraction, Rational)):
            return format_rational(o)
        if isinstance(o, MatrixBase):
            return [[int(entry) for entry in o.row(i)] for i in range(o.rows)]
        if isinstance(o, Enum):
            return o.value
        if isinstance(o, (set, frozenset)):
            return sorted(o)
        if hasattr(o, "to_payload"):
            return o.to_payload()
        return super().default(o)


def dumps(payload: Any, *, indent: int | None = 2) -> str:
    return json.dumps(payload, cls=ExactJSONEncoder, indent=indent, ensure_ascii=False)
