"""Deterministic JSON emission with 17-significant-digit reals.

float('%.17g' % x) == x for every finite float64, so serialized models and
reports reload bit-exactly.  Key order is insertion order; output bytes are
identical across runs given identical values.
"""

from __future__ import annotations

import json

import numpy as np


def format_real(x: float) -> str:
    if not np.isfinite(x):
        raise ValueError(f"cannot serialize non-finite real: {x}")
    return format(float(x), ".17g")


def _write(obj, out: list[str], indent: int | None, level: int) -> None:
    pad = "" if indent is None else "\n" + " " * indent * (level + 1)
    end_pad = "" if indent is None else "\n" + " " * indent * level
    if obj is None:
        out.append("null")
    elif isinstance(obj, bool):
        out.append("true" if obj else "false")
    elif isinstance(obj, (int, np.integer)):
        out.append(str(int(obj)))
    elif isinstance(obj, (float, np.floating)):
        out.append(format_real(obj))
    elif isinstance(obj, str):
        out.append(json.dumps(obj, ensure_ascii=False))
    elif isinstance(obj, np.ndarray):
        if obj.ndim == 1:
            if obj.dtype.kind in "iu":
                out.append("[" + ",".join(str(int(v)) for v in obj.tolist()) + "]")
            else:
                out.append("[" + ",".join(format_real(v) for v in obj.tolist()) + "]")
        else:
            _write([row for row in obj], out, None, level)
    elif isinstance(obj, (list, tuple)):
        if not obj:
            out.append("[]")
            return
        out.append("[")
        for i, item in enumerate(obj):
            if i:
                out.append(",")
            out.append(pad)
            _write(item, out, indent, level + 1)
        out.append(end_pad + "]")
    elif isinstance(obj, dict):
        if not obj:
            out.append("{}")
            return
        out.append("{")
        for i, (key, value) in enumerate(obj.items()):
            if i:
                out.append(",")
            out.append(pad)
            out.append(json.dumps(str(key)) + (": " if indent is not None else ":"))
            _write(value, out, indent, level + 1)
        out.append(end_pad + "}")
    else:
        raise TypeError(f"cannot serialize {type(obj).__name__}")


def dumps(obj, indent: int | None = None) -> str:
    out: list[str] = []
    _write(obj, out, indent, 0)
    return "".join(out)


def dump_file(obj, path: str, indent: int | None = None) -> None:
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write(dumps(obj, indent))
        fh.write("\n")
