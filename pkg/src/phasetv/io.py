"""On-disk formats: PHF2 raw fields, 16-bit PGM previews, trace CSV, JSON reports.

PHF2 layout (little-endian): ``b"PHF2"``, u32 version (1), u32 rows, u32 cols,
then rows*cols float64 values in row-major order.
"""

from __future__ import annotations

import csv
import json
import struct
from pathlib import Path

import numpy as np

from .solvers import SolveReport

__all__ = [
    "FormatError",
    "write_field",
    "read_field",
    "write_pgm16",
    "read_pgm",
    "write_trace",
    "write_json",
    "read_json",
    "TRACE_COLUMNS",
]

MAGIC = b"PHF2"
VERSION = 1
_HEADER = struct.Struct("<4sIII")

TRACE_COLUMNS = (
    "iter",
    "rel_change",
    "energy_total",
    "energy_fit_real",
    "energy_fit_im",
    "energy_pyth",
    "energy_tv_real",
    "energy_tv_im",
)


class FormatError(ValueError):
    """A file does not match the expected layout."""


def write_field(path, field: np.ndarray) -> None:
    field = np.asarray(field, dtype=np.float64)
    if field.ndim != 2:
        raise ValueError(f"expected a 2D field, got shape {field.shape}")
    rows, cols = field.shape
    with open(path, "wb") as fh:
        fh.write(_HEADER.pack(MAGIC, VERSION, rows, cols))
        fh.write(np.ascontiguousarray(field, dtype="<f8").tobytes())


def read_field(path) -> np.ndarray:
    raw = Path(path).read_bytes()
    if len(raw) < _HEADER.size:
        raise FormatError(f"{path}: truncated header")
    magic, version, rows, cols = _HEADER.unpack_from(raw)
    if magic != MAGIC:
        raise FormatError(f"{path}: bad magic {magic!r}")
    if version != VERSION:
        raise FormatError(f"{path}: unsupported version {version}")
    expected = _HEADER.size + 8 * rows * cols
    if len(raw) != expected:
        raise FormatError(f"{path}: expected {expected} bytes, found {len(raw)}")
    data = np.frombuffer(raw, dtype="<f8", offset=_HEADER.size).reshape(rows, cols)
    return data.astype(np.float64)


def write_pgm16(path, field: np.ndarray, lo: float = -np.pi, hi: float = np.pi) -> None:
    """Binary 16-bit graymap mapping [lo, hi] linearly onto [0, 65535]. Preview only."""
    field = np.asarray(field, dtype=np.float64)
    scaled = np.clip((field - lo) / (hi - lo), 0.0, 1.0) * 65535.0
    pixels = np.rint(scaled).astype(">u2")
    rows, cols = field.shape
    with open(path, "wb") as fh:
        fh.write(f"P5\n{cols} {rows}\n65535\n".encode("ascii"))
        fh.write(pixels.tobytes())


def read_pgm(path) -> tuple[np.ndarray, int]:
    """Read a binary (P5) graymap; returns the raw integer levels and maxval."""
    raw = Path(path).read_bytes()
    tokens = []
    pos = 0
    while len(tokens) < 4:
        while pos < len(raw) and raw[pos : pos + 1].isspace():
            pos += 1
        if raw[pos : pos + 1] == b"#":
            while pos < len(raw) and raw[pos : pos + 1] not in (b"\n", b"\r"):
                pos += 1
            continue
        start = pos
        while pos < len(raw) and not raw[pos : pos + 1].isspace():
            pos += 1
        if start == pos:
            raise FormatError(f"{path}: truncated PGM header")
        tokens.append(raw[start:pos])
    if tokens[0] != b"P5":
        raise FormatError(f"{path}: only binary P5 graymaps are supported")
    cols, rows, maxval = (int(t) for t in tokens[1:])
    pos += 1
    dtype = ">u2" if maxval > 255 else "u1"
    count = rows * cols
    if len(raw) - pos < count * np.dtype(dtype).itemsize:
        raise FormatError(f"{path}: truncated PGM data")
    levels = np.frombuffer(raw, dtype=dtype, count=count, offset=pos).reshape(rows, cols)
    return levels.astype(np.int64), maxval


def write_trace(path, report: SolveReport) -> None:
    """Convergence trace, one row per outer iteration (row 0 is the initial iterate).

    A diverged run may end with a row that has an energy but no relative change.
    """
    energies = report.energies or []
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(TRACE_COLUMNS)
        rels = report.relative_changes
        for k in range(max(len(rels) + 1, len(energies))):
            row = [k, repr(rels[k - 1]) if 0 < k <= len(rels) else ""]
            if k < len(energies):
                e = energies[k]
                row += [repr(v) for v in (e.total, e.fit_real, e.fit_im, e.pythagoras, e.tv_real, e.tv_im)]
            else:
                row += [""] * 6
            writer.writerow(row)


def _default(obj):
    if isinstance(obj, (np.floating, np.integer)):
        return obj.item()
    if isinstance(obj, np.bool_):
        return bool(obj)
    if isinstance(obj, Path):
        return str(obj)
    raise TypeError(f"not JSON serialisable: {type(obj).__name__}")


def write_json(path, payload: dict) -> None:
    with open(path, "w") as fh:
        json.dump(payload, fh, indent=2, sort_keys=True, default=_default)
        fh.write("\n")


def read_json(path) -> dict:
    with open(path) as fh:
        return json.load(fh)
