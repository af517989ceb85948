"""Lossless JSON interchange for rationals."""

import json
from fractions import Fraction

from .errors import ValidationError


def fmt_rational(x) -> str:
    """'num/den' reduced with positive denominator; integers as 'n'."""
    return str(Fraction(x))


def parse_rational(v, where="value") -> Fraction:
    if isinstance(v, bool) or not isinstance(v, (int, str, Fraction)):
        raise ValidationError(f"{where}: expected an integer or 'num/den' string, got {v!r}")
    try:
        return Fraction(v)
    except (ValueError, ZeroDivisionError):
        raise ValidationError(f"{where}: malformed rational {v!r}") from None


def parse_int(v, where="value") -> int:
    if isinstance(v, bool) or not isinstance(v, int):
        raise ValidationError(f"{where}: expected an integer, got {v!r}")
    return v


def dumps(doc) -> str:
    """Deterministic serialisation: sorted keys, fixed separators."""
    return json.dumps(doc, sort_keys=True, indent=2, ensure_ascii=False) + "\n"


def loads(text: str, source="<input>"):
    try:
        return json.loads(text)
    except json.JSONDecodeError as exc:
        raise ValidationError(f"{source}: malformed JSON at line {exc.lineno}, column {exc.colno}: {exc.msg}") from None
