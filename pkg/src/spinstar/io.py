"""Raster and report serialization: CSV, 16-bit PGM and key=value text."""

import hashlib

import numpy as np


def _fmt(x):
    return format(float(x), ".17g")


def raster_to_csv(raster):
    """CSV text: header ``<axis0 name>,<axis1 values...>`` then one row per ``axis0`` value.

    Floats use 17 significant digits so values round-trip exactly.
    """
    lines = [",".join([raster.axis0_name] + [_fmt(v) for v in raster.axis1])]
    for a0, row in zip(raster.axis0, raster.values):
        lines.append(",".join([_fmt(a0)] + [_fmt(v) for v in row]))
    return "\n".join(lines) + "\n"


def read_csv_raster(text):
    """Inverse of :func:`raster_to_csv`: returns ``(axis0, axis1, values)``."""
    rows = [line.split(",") for line in text.strip().split("\n")]
    axis1 = np.array([float(v) for v in rows[0][1:]])
    body = np.array([[float(v) for v in r] for r in rows[1:]])
    return body[:, 0], axis1, body[:, 1:]


def raster_to_pgm(raster):
    """Binary P5 PGM, 16-bit big-endian, ``maxval = 65535``; row 0 is ``axis0[0]``."""
    scaled = np.rint(np.clip(raster.values, 0.0, 1.0) * 65535.0).astype(">u2")
    rows, cols = scaled.shape
    return f"P5\n{cols} {rows}\n65535\n".encode("ascii") + scaled.tobytes()


def read_pgm(data):
    """Parse a 16-bit P5 file written by :func:`raster_to_pgm` into a uint16 array."""
    parts = data.split(b"\n", 3)
    if parts[0] != b"P5":
        raise ValueError("not a binary PGM")
    cols, rows = (int(v) for v in parts[1].split())
    if int(parts[2]) != 65535:
        raise ValueError("expected maxval 65535")
    return np.frombuffer(parts[3], dtype=">u2").reshape(rows, cols)


def to_keyvalue(mapping):
    return "".join(f"{k} = {v}\n" for k, v in mapping.items())


def parse_keyvalue(text):
    """``key = value`` lines; blank lines and ``#`` comments are skipped."""
    out = {}
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ValueError(f"line {lineno}: expected 'key = value', got {raw!r}")
        key, value = line.split("=", 1)
        out[key.strip()] = value.strip()
    return out


def sha256(data):
    return hashlib.sha256(data).hexdigest()
