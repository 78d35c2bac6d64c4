"""JSON formats for arrangements and cones.

Arrangement: ``{"dim": d, "hyperplanes": [[entries]]}``, optional
``"offsets"`` (must be all zero).  Cone: ``{"dim": d, "inequalities":
[[entries]]}`` meaning ``row . y >= 0``.  Entries are integers or ``"p/q"``
strings.
"""

from __future__ import annotations

import json
from fractions import Fraction
from pathlib import Path

from . import linalg
from .arrangement import Arrangement, canonicalize
from .cones import Cone
from .errors import ArrangementError


def rational_str(x: Fraction) -> str:
    x = Fraction(x)
    return str(x.numerator) if x.denominator == 1 else f"{x.numerator}/{x.denominator}"


def encode_entry(x: Fraction):
    x = Fraction(x)
    return x.numerator if x.denominator == 1 else rational_str(x)


def arrangement_to_dict(arr: Arrangement) -> dict:
    return {"dim": arr.dimension, "hyperplanes": [[encode_entry(x) for x in h.normal] for h in arr.hyperplanes]}


def arrangement_from_dict(data: dict) -> Arrangement:
    try:
        d = int(data["dim"])
        rows = [[linalg.to_fraction(x) for x in row] for row in data["hyperplanes"]]
    except (KeyError, TypeError, ValueError) as exc:
        raise ArrangementError(f"malformed arrangement: {exc}") from exc
    return canonicalize(rows, d, data.get("offsets"))


def load_arrangement(path) -> Arrangement:
    return arrangement_from_dict(json.loads(Path(path).read_text()))


def dump_arrangement(arr: Arrangement, path=None) -> str:
    text = json.dumps(arrangement_to_dict(arr)) + "\n"
    if path is not None:
        Path(path).write_text(text)
    return text


def load_cone(path) -> Cone:
    data = json.loads(Path(path).read_text())
    try:
        d = int(data["dim"])
        rows = [linalg.vec(r) for r in data["inequalities"]]
    except (KeyError, TypeError, ValueError) as exc:
        raise ArrangementError(f"malformed cone: {exc}") from exc
    if any(len(r) != d for r in rows):
        raise ArrangementError("inequality length does not match dim")
    return Cone.from_exact(rows, dim=d)
