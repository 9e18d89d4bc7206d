"""Deterministic serialization of reports and trajectories.

Reports are JSON with sorted keys and every float written with 17
significant digits, so identical runs give byte-identical files. Complex
numbers become ``{"im": ..., "re": ...}``; non-finite floats become the
strings ``"nan"``, ``"inf"`` and ``"-inf"``.

Trajectory tables are delimited text with a header row and the same
17-digit formatting, which round-trips every float exactly.
"""

from __future__ import annotations

import csv
import enum
import json
import math
import os
import tempfile
from dataclasses import fields, is_dataclass
from pathlib import Path
from typing import Any, Iterable, Sequence

import numpy as np


def format_float(x: float) -> str:
    x = float(x)
    if math.isnan(x):
        return '"nan"'
    if math.isinf(x):
        return '"inf"' if x > 0 else '"-inf"'
    text = format(x, ".17g")
    # keep floats recognisable as floats
    if text.lstrip("-").isdigit():
        text += ".0"
    return text


def to_plain(obj: Any) -> Any:
    """Turn dataclasses, enums, numpy scalars and complex values into JSON-ready data."""
    if is_dataclass(obj) and not isinstance(obj, type):
        return {f.name: to_plain(getattr(obj, f.name)) for f in fields(obj)}
    if isinstance(obj, enum.Enum):
        return obj.value
    if isinstance(obj, dict):
        return {str(k): to_plain(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [to_plain(v) for v in obj]
    if isinstance(obj, np.ndarray):
        return [to_plain(v) for v in obj.tolist()]
    if isinstance(obj, (bool, np.bool_)):
        return bool(obj)
    if isinstance(obj, (int, np.integer)):
        return int(obj)
    if isinstance(obj, (float, np.floating)):
        return float(obj)
    if isinstance(obj, (complex, np.complexfloating)):
        return {"re": float(obj.real), "im": float(obj.imag)}
    if obj is None or isinstance(obj, str):
        return obj
    if isinstance(obj, Path):
        return str(obj)
    raise TypeError(f"cannot serialize {type(obj).__name__}")


def _emit(obj: Any, indent: int, out: list[str]) -> None:
    pad = "  " * indent
    if obj is None:
        out.append("null")
    elif obj is True:
        out.append("true")
    elif obj is False:
        out.append("false")
    elif isinstance(obj, int):
        out.append(str(obj))
    elif isinstance(obj, float):
        out.append(format_float(obj))
    elif isinstance(obj, str):
        out.append(_quote(obj))
    elif isinstance(obj, list):
        if not obj:
            out.append("[]")
            return
        out.append("[\n")
        for i, item in enumerate(obj):
            out.append(pad + "  ")
            _emit(item, indent + 1, out)
            out.append(",\n" if i < len(obj) - 1 else "\n")
        out.append(pad + "]")
    elif isinstance(obj, dict):
        if not obj:
            out.append("{}")
            return
        out.append("{\n")
        keys = sorted(obj)
        for i, key in enumerate(keys):
            out.append(pad + "  " + _quote(key) + ": ")
            _emit(obj[key], indent + 1, out)
            out.append(",\n" if i < len(keys) - 1 else "\n")
        out.append(pad + "}")
    else:
        raise TypeError(f"cannot serialize {type(obj).__name__}")


def _quote(s: str) -> str:
    return json.dumps(s, ensure_ascii=False)


def dumps_report(obj: Any) -> str:
    out: list[str] = []
    _emit(to_plain(obj), 0, out)
    out.append("\n")
    return "".join(out)


def loads_report(text: str) -> Any:
    return json.loads(text)


def atomic_write_text(path, text: str) -> None:
    """Write through a temporary file in the same directory, then rename."""
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    fd, tmp = tempfile.mkstemp(dir=path.parent, prefix=f".{path.name}.", suffix=".tmp")
    try:
        with os.fdopen(fd, "w", newline="") as fh:
            fh.write(text)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def write_report(path, obj: Any) -> None:
    atomic_write_text(path, dumps_report(obj))


def table_text(header: Sequence[str], columns: Iterable[np.ndarray], delimiter: str = ",") -> str:
    cols = [np.asarray(c, dtype=float) for c in columns]
    if len(cols) != len(header):
        raise ValueError("header and column count differ")
    n = len(cols[0]) if cols else 0
    lines = [delimiter.join(header)]
    fmt = np.vectorize(lambda x: format(x, ".17g"), otypes=[object])
    text_cols = [fmt(c) if n else c for c in cols]
    for i in range(n):
        lines.append(delimiter.join(tc[i] for tc in text_cols))
    return "\n".join(lines) + "\n"


def write_table(path, header: Sequence[str], columns: Iterable[np.ndarray], delimiter: str = ",") -> None:
    atomic_write_text(path, table_text(header, columns, delimiter))


def read_table(path, delimiter: str | None = None) -> tuple[list[str], np.ndarray]:
    """Read a table written by :func:`write_table`; returns (header, 2-D array)."""
    path = Path(path)
    if delimiter is None:
        delimiter = "\t" if path.suffix == ".tsv" else ","
    with open(path, newline="") as fh:
        rows = list(csv.reader(fh, delimiter=delimiter))
    header, body = rows[0], rows[1:]
    data = np.array([[float(x) for x in row] for row in body], dtype=float).reshape(len(body), len(header))
    return header, data
