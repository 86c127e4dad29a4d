"""Deterministic report serialisation and atomic file writes.

Reports must be byte-identical across runs for the same inputs, so floats are
rendered at a fixed 6 significant digits, money values (``Fixed2``) at exact
two decimals, and keys keep their insertion order.
"""

from __future__ import annotations

import hashlib
import json
import math
import os
import tempfile
from pathlib import Path


class Fixed2(int):
    """A quantity held in hundredths (cents, hundredths of a pound) that
    renders with exactly two decimals."""

    def render(self) -> str:
        sign = "-" if self < 0 else ""
        mag = abs(int(self))
        return f"{sign}{mag // 100}.{mag % 100:02d}"


def format_float(x: float, mode: str = "report") -> str:
    if math.isnan(x) or math.isinf(x):
        raise ValueError(f"cannot serialise non-finite float {x}")
    if x == int(x) and abs(x) < 1e15:
        return f"{int(x)}.0"
    if mode == "exact":
        return repr(x)
    return format(x, ".6g")


def dumps_stable(obj, indent: int = 2, float_mode: str = "report") -> str:
    """Serialise to JSON with deterministic formatting (see module docstring).

    ``float_mode='report'`` renders floats at 6 significant digits (report
    outputs); ``'exact'`` uses the shortest round-trip repr (configuration
    documents, where parse(serialise(x)) must equal x).
    """
    out: list[str] = []
    _write(obj, out, indent, 0, float_mode)
    out.append("\n")
    return "".join(out)


def _write(obj, out: list[str], indent: int, level: int, float_mode: str = "report") -> None:
    pad = " " * (indent * (level + 1))
    end_pad = " " * (indent * level)
    if obj is None:
        out.append("null")
    elif isinstance(obj, bool):
        out.append("true" if obj else "false")
    elif isinstance(obj, Fixed2):
        out.append(obj.render())
    elif isinstance(obj, int):
        out.append(str(obj))
    elif isinstance(obj, float):
        out.append(format_float(obj, float_mode))
    elif isinstance(obj, str):
        out.append(json.dumps(obj))
    elif isinstance(obj, dict):
        if not obj:
            out.append("{}")
            return
        out.append("{\n")
        for i, (k, v) in enumerate(obj.items()):
            out.append(f"{pad}{json.dumps(str(k))}: ")
            _write(v, out, indent, level + 1, float_mode)
            out.append(",\n" if i < len(obj) - 1 else "\n")
        out.append(end_pad + "}")
    elif isinstance(obj, (list, tuple)):
        if not obj:
            out.append("[]")
            return
        out.append("[\n")
        for i, v in enumerate(obj):
            out.append(pad)
            _write(v, out, indent, level + 1, float_mode)
            out.append(",\n" if i < len(obj) - 1 else "\n")
        out.append(end_pad + "]")
    else:
        raise TypeError(f"cannot serialise {type(obj).__name__}")


def atomic_write_text(path: str | Path, text: str) -> None:
    """Write via a temp file and rename, so readers never see partial files."""
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    fd, tmp = tempfile.mkstemp(dir=path.parent, prefix=f".{path.name}.")
    try:
        with os.fdopen(fd, "w") as fh:
            fh.write(text)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def sha256_hex(data: bytes) -> str:
    return hashlib.sha256(data).hexdigest()


def write_csv(path: str | Path, header: list[str], rows: list[list[str]]) -> None:
    lines = [",".join(header)]
    lines.extend(",".join(str(c) for c in row) for row in rows)
    atomic_write_text(path, "\n".join(lines) + "\n")
