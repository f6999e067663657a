"""File output: atomic writes, full-precision CSV, JSON and run manifests."""

from __future__ import annotations

import csv
import io
import json
import os
import tempfile
from pathlib import Path

import numpy as np

CSV_DIGITS = 17


def atomic_write(path, data) -> Path:
    """Write to a temporary file beside ``path`` and rename it into place."""
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    raw = data.encode("utf-8") if isinstance(data, str) else data
    fd, tmp = tempfile.mkstemp(dir=path.parent, prefix=f".{path.name}.", suffix=".tmp")
    try:
        with os.fdopen(fd, "wb") as fh:
            fh.write(raw)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise
    return path


def fmt(x) -> str:
    if isinstance(x, str):
        return x
    if isinstance(x, (bool, np.bool_)):
        return str(bool(x)).lower()
    if isinstance(x, (int, np.integer)):
        return str(int(x))
    return format(float(x), f".{CSV_DIGITS}g")


def csv_text(header, rows) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(header)
    for row in rows:
        w.writerow([fmt(v) for v in row])
    return buf.getvalue()


def write_csv(path, header, rows) -> Path:
    return atomic_write(path, csv_text(header, rows))


def read_csv(path):
    with open(path, newline="") as fh:
        r = csv.reader(fh)
        header = next(r)
        rows = [row for row in r]
    return header, rows


def _default(o):
    if isinstance(o, np.ndarray):
        return o.tolist()
    if isinstance(o, np.generic):
        return o.item()
    if isinstance(o, complex):
        return {"re": o.real, "im": o.imag}
    if isinstance(o, Path):
        return str(o)
    raise TypeError(f"cannot serialise {type(o).__name__}")


def json_text(obj) -> str:
    return json.dumps(obj, indent=2, sort_keys=True, default=_default, ensure_ascii=False) + "\n"


def write_json(path, obj) -> Path:
    return atomic_write(path, json_text(obj))


def sidecar(path, suffix: str) -> Path:
    """``out.csv`` -> ``out<suffix>``."""
    p = Path(path)
    return p.with_name(p.stem + suffix)


def manifest(command: str, parameters: dict, seed, outputs, version: str) -> dict:
    return {
        "command": command,
        "parameters": parameters,
        "seed": seed,
        "outputs": [str(o) for o in outputs],
        "tool_version": version,
    }


def matrix_columns(dim: int) -> list[str]:
    return [f"{part}_{i}{j}" for i in range(dim) for j in range(dim) for part in ("re", "im")]


def matrix_row(u) -> list[float]:
    u = np.asarray(u)
    out = np.empty(u.size * 2)
    out[0::2] = u.real.ravel()
    out[1::2] = u.imag.ravel()
    return out.tolist()
