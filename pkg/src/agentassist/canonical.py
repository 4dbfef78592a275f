"""Canonical byte-stable serialization.

Every document the engine persists or transmits (journal entries, state
snapshots, wire frames, reports) is rendered through :func:`dumps` so that
value-equal documents always produce identical bytes: map keys are sorted,
integers are written bare, floats are fixed to six decimal places, and
strings use JSON escaping. The output is a single line of valid JSON, so
:func:`loads` is plain ``json.loads``.
"""

from __future__ import annotations

import json
import math
from typing import Any


def format_float(value: float) -> str:
    """Render a float at exactly six decimal places; -0.0 normalizes to 0."""
    if not math.isfinite(value):
        raise ValueError(f"non-finite float is not serializable: {value!r}")
    if value == 0.0:
        return "0.000000"
    return f"{value:.6f}"


def dumps(doc: Any) -> str:
    out: list[str] = []
    _write(doc, out)
    return "".join(out)


def dump_line(doc: Any) -> bytes:
    """Canonical form plus the newline used by journals and the wire."""
    return (dumps(doc) + "\n").encode("utf-8")


def loads(text: str | bytes) -> Any:
    return json.loads(text)


def _write(doc: Any, out: list[str]) -> None:
    if doc is None:
        out.append("null")
    elif doc is True:
        out.append("true")
    elif doc is False:
        out.append("false")
    elif isinstance(doc, str):
        out.append(json.dumps(doc, ensure_ascii=False))
    elif isinstance(doc, int):
        out.append(str(doc))
    elif isinstance(doc, float):
        out.append(format_float(doc))
    elif isinstance(doc, dict):
        out.append("{")
        first = True
        for key in sorted(doc):
            if not isinstance(key, str):
                raise TypeError(f"map keys must be strings, got {key!r}")
            if not first:
                out.append(",")
            first = False
            out.append(json.dumps(key, ensure_ascii=False))
            out.append(":")
            _write(doc[key], out)
        out.append("}")
    elif isinstance(doc, (list, tuple)):
        out.append("[")
        for i, item in enumerate(doc):
            if i:
                out.append(",")
            _write(item, out)
        out.append("]")
    else:
        raise TypeError(f"not canonically serializable: {type(doc).__name__}")
