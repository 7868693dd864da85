"""Parsing of quantities with unit suffixes (``18ns``, ``170nA``, ``7um2``).

Scaling goes through Decimal so that ``170nA`` is bit-identical to ``170e-9``.
"""
from __future__ import annotations

import math
import re
from decimal import Decimal, InvalidOperation

_PREFIX = {"": 0, "k": 3, "m": -3, "u": -6, "µ": -6, "μ": -6, "n": -9, "p": -12}

_BASE = {
    "time": "s",
    "current": "A",
    "length": "m",
    "area": "m2",
    "velocity": "m/s",
}

_NUMBER = re.compile(r"^\s*([-+]?(?:\d+\.?\d*|\.\d+)(?:[eE][-+]?\d+)?)\s*(.*?)\s*$")


def parse_quantity(text, kind: str, allow_inf: bool = False) -> float:
    """Convert ``text`` (number or string with an SI-prefixed unit) to SI units."""
    if isinstance(text, (int, float)) and not isinstance(text, bool):
        value = float(text)
        if math.isinf(value) and not allow_inf:
            raise ValueError(f"infinite {kind} not allowed")
        return value
    s = str(text).strip()
    if s.lower() in ("inf", "infinity", "+inf"):
        if not allow_inf:
            raise ValueError(f"infinite {kind} not allowed")
        return math.inf
    m = _NUMBER.match(s)
    if not m:
        raise ValueError(f"cannot parse {kind} {text!r}")
    number, unit = m.groups()
    exponent = _unit_exponent(unit.replace("^", ""), kind)
    try:
        return float(Decimal(number).scaleb(exponent))
    except InvalidOperation as exc:
        raise ValueError(f"cannot parse {kind} {text!r}") from exc


def _unit_exponent(unit: str, kind: str) -> int:
    base = _BASE[kind]
    if unit in ("", base):
        return 0
    if not unit.endswith(base) or unit[: -len(base)] not in _PREFIX:
        raise ValueError(f"unknown unit {unit!r} for {kind} (expected e.g. n{base})")
    exp = _PREFIX[unit[: -len(base)]]
    return 2 * exp if kind == "area" else exp
