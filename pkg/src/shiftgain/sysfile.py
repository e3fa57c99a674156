"""JSON system files.

A system file holds ``"A"`` and ``"B"`` as nested row lists and an optional
``"name"``. Each entry is either a real number or a two-element ``[re, im]``
list.
"""
from __future__ import annotations

import json
import math
from pathlib import Path

import numpy as np

from .errors import InvalidParams
from .system import ControlSystem


def _parse_entry(value) -> complex:
    if isinstance(value, bool):
        raise InvalidParams("booleans are not matrix entries")
    if isinstance(value, (int, float)):
        return complex(float(value), 0.0)
    if isinstance(value, list) and len(value) == 2 and all(
        isinstance(v, (int, float)) and not isinstance(v, bool) for v in value
    ):
        return complex(float(value[0]), float(value[1]))
    raise InvalidParams(f"bad matrix entry {value!r}")


def _parse_matrix(rows, name: str) -> np.ndarray:
    if not isinstance(rows, list) or not rows or not all(isinstance(r, list) for r in rows):
        raise InvalidParams(f"{name} must be a nonempty list of rows")
    width = len(rows[0])
    if width == 0 or any(len(r) != width for r in rows):
        raise InvalidParams(f"{name} is not rectangular")
    return np.array([[_parse_entry(v) for v in r] for r in rows], dtype=complex)


def _encode_entry(z: complex):
    re, im = float(z.real), float(z.imag)
    if im == 0.0 and math.copysign(1.0, im) > 0:
        return re
    return [re, im]


def _encode_matrix(M: np.ndarray) -> list:
    return [[_encode_entry(z) for z in row] for row in M]


def system_from_dict(doc: dict) -> ControlSystem:
    if not isinstance(doc, dict) or "A" not in doc or "B" not in doc:
        raise InvalidParams('system document needs keys "A" and "B"')
    return ControlSystem(
        _parse_matrix(doc["A"], "A"), _parse_matrix(doc["B"], "B"), doc.get("name")
    )


def system_to_dict(sys: ControlSystem) -> dict:
    doc = {"A": _encode_matrix(sys.A), "B": _encode_matrix(sys.B)}
    if sys.name is not None:
        doc["name"] = sys.name
    return doc


def load_system(path: str | Path) -> ControlSystem:
    with open(path) as fh:
        doc = json.load(fh)
    return system_from_dict(doc)


def save_system(sys: ControlSystem, path: str | Path) -> None:
    with open(path, "w") as fh:
        json.dump(system_to_dict(sys), fh, indent=1)
        fh.write("\n")
