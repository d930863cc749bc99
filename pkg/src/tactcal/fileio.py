"""Boundary file formats. Files are in mm / degrees / kPa; everything returned is SI.

Normal series::

    total_disp_mm,gamma1_mm
    0.912,0.600          # comments start with '#'

Torsion series::

    total_angle_deg,theta1_deg

Grid field::

    # tactcal grid field v1
    nx,ny,pitch_mm,origin_x_mm,origin_y_mm,quantity
    8,8,0.5,0.0,0.0,displacement_mm
    ix,iy,vx,vy,vz
    0,0,0.0,0.0,0.0012
    ...

``quantity`` is ``displacement_mm`` or ``traction_kpa``.
"""

import csv
import hashlib
import io
import json
import math

import numpy as np

from .calibration import DisplacementSample, TorsionSample
from .errors import InputFormatError
from .halfspace import DisplacementField, SurfaceGrid, TractionField

MM = 1e-3
KPA = 1e3
DEG = math.pi / 180.0

NORMAL_HEADER = ("total_disp_mm", "gamma1_mm")
TORSION_HEADER = ("total_angle_deg", "theta1_deg")
FIELD_MAGIC = "# tactcal grid field v1"
FIELD_META = ("nx", "ny", "pitch_mm", "origin_x_mm", "origin_y_mm", "quantity")
FIELD_COLUMNS = ("ix", "iy", "vx", "vy", "vz")
QUANTITIES = {"displacement_mm": (DisplacementField, MM), "traction_kpa": (TractionField, KPA)}


def _fmt(x):
    """Shortest round-tripping decimal form of ``x``."""
    return repr(float(x))


def sha256_file(path):
    h = hashlib.sha256()
    with open(path, "rb") as fh:
        for chunk in iter(lambda: fh.read(1 << 16), b""):
            h.update(chunk)
    return h.hexdigest()


def _rows(path, text=None):
    """Yield ``(line_number, fields)`` for non-blank, non-comment lines."""
    if text is None:
        with open(path, newline="") as fh:
            text = fh.read()
    for lineno, line in enumerate(text.splitlines(), start=1):
        body = line.split("#", 1)[0].strip()
        if not body:
            continue
        yield lineno, next(csv.reader([body]))


def _float(value, path, lineno, col):
    try:
        x = float(value)
    except ValueError:
        raise InputFormatError(f"not a number: {value.strip()!r}", path, lineno, col) from None
    if not math.isfinite(x):
        raise InputFormatError(f"non-finite value {value.strip()!r}", path, lineno, col)
    return x


def _read_pairs(path, header, scale):
    rows = _rows(path)
    out = []
    first = next(rows, None)
    if first is None:
        return out
    lineno, fields = first
    if tuple(f.strip() for f in fields) != header:
        raise InputFormatError(f"expected header {','.join(header)!r}", path, lineno)
    for lineno, fields in rows:
        if len(fields) != 2:
            raise InputFormatError(f"expected 2 fields, got {len(fields)}", path, lineno)
        a, b = (_float(v, path, lineno, i + 1) for i, v in enumerate(fields))
        out.append((a * scale, b * scale))
    return out


def read_normal_csv(path):
    return [DisplacementSample(t, g) for t, g in _read_pairs(path, NORMAL_HEADER, MM)]


def read_torsion_csv(path):
    return [TorsionSample(t, th) for t, th in _read_pairs(path, TORSION_HEADER, DEG)]


def _write_pairs(path, header, pairs, scale, comment=None):
    buf = io.StringIO()
    if comment:
        for line in comment.splitlines():
            buf.write(f"# {line}\n")
    buf.write(",".join(header) + "\n")
    for a, b in pairs:
        buf.write(f"{_fmt(a / scale)},{_fmt(b / scale)}\n")
    with open(path, "w", newline="") as fh:
        fh.write(buf.getvalue())


def write_normal_csv(path, samples, comment=None):
    _write_pairs(
        path, NORMAL_HEADER, [(s.total_displacement, s.gamma1) for s in samples], MM, comment
    )


def write_torsion_csv(path, samples, comment=None):
    _write_pairs(path, TORSION_HEADER, [(s.total_angle, s.theta1) for s in samples], DEG, comment)


def write_field(path, field, comment=None):
    """Write a displacement or traction field in the grid-field format."""
    if isinstance(field, DisplacementField):
        quantity, scale = "displacement_mm", MM
    elif isinstance(field, TractionField):
        quantity, scale = "traction_kpa", KPA
    else:
        raise TypeError(f"cannot serialise {type(field).__name__}")
    g = field.grid
    lines = [FIELD_MAGIC]
    if comment:
        lines += [f"# {c}" for c in comment.splitlines()]
    lines.append(",".join(FIELD_META))
    lines.append(
        f"{g.nx},{g.ny},{_fmt(g.pitch / MM)},{_fmt(g.origin[0] / MM)},{_fmt(g.origin[1] / MM)},"
        f"{quantity}"
    )
    lines.append(",".join(FIELD_COLUMNS))
    v = field.values / scale
    for ix in range(g.nx):
        for iy in range(g.ny):
            vx, vy, vz = v[ix, iy]
            lines.append(f"{ix},{iy},{_fmt(vx)},{_fmt(vy)},{_fmt(vz)}")
    with open(path, "w", newline="") as fh:
        fh.write("\n".join(lines) + "\n")


def read_field(path):
    """Read a grid-field file; returns a DisplacementField or TractionField (SI)."""
    rows = _rows(path)
    try:
        lineno, meta_head = next(rows)
        if tuple(f.strip() for f in meta_head) != FIELD_META:
            raise InputFormatError(f"expected header {','.join(FIELD_META)!r}", path, lineno)
        lineno, meta = next(rows)
        if len(meta) != len(FIELD_META):
            raise InputFormatError("malformed grid description", path, lineno)
        try:
            nx, ny = int(meta[0]), int(meta[1])
        except ValueError:
            raise InputFormatError("nx, ny must be integers", path, lineno) from None
        pitch, ox, oy = (_float(meta[i], path, lineno, i + 1) * MM for i in (2, 3, 4))
        quantity = meta[5].strip()
        if quantity not in QUANTITIES:
            raise InputFormatError(f"unknown quantity {quantity!r}", path, lineno, 6)
        lineno, cols = next(rows)
        if tuple(f.strip() for f in cols) != FIELD_COLUMNS:
            raise InputFormatError(f"expected columns {','.join(FIELD_COLUMNS)!r}", path, lineno)
    except StopIteration:
        raise InputFormatError("truncated grid-field header", path) from None
    try:
        grid = SurfaceGrid(nx, ny, pitch, (ox, oy))
    except ValueError as exc:
        raise InputFormatError(str(exc), path, lineno) from None
    cls, scale = QUANTITIES[quantity]
    values = np.full((nx, ny, 3), np.nan)
    seen = np.zeros((nx, ny), dtype=bool)
    for lineno, fields in rows:
        if len(fields) != 5:
            raise InputFormatError(f"expected 5 fields, got {len(fields)}", path, lineno)
        try:
            ix, iy = int(fields[0]), int(fields[1])
        except ValueError:
            raise InputFormatError("node indices must be integers", path, lineno) from None
        if not (0 <= ix < nx and 0 <= iy < ny):
            raise InputFormatError(f"node ({ix}, {iy}) outside {nx}x{ny} grid", path, lineno)
        if seen[ix, iy]:
            raise InputFormatError(f"node ({ix}, {iy}) listed twice", path, lineno)
        seen[ix, iy] = True
        values[ix, iy] = [_float(fields[k], path, lineno, k + 1) * scale for k in (2, 3, 4)]
    if not seen.all():
        missing = int((~seen).sum())
        raise InputFormatError(f"{missing} of {nx * ny} grid nodes missing", path)
    return cls(grid, values)


def write_json(path, obj):
    with open(path, "w") as fh:
        json.dump(obj, fh, indent=2, sort_keys=True, allow_nan=True)
        fh.write("\n")


def read_json(path):
    try:
        with open(path) as fh:
            return json.load(fh)
    except json.JSONDecodeError as exc:
        raise InputFormatError(exc.msg, path, exc.lineno, exc.colno) from None


def write_table(path, header, rows, comment=None):
    """Delimited table with optional ``#`` comment preamble."""
    buf = io.StringIO()
    if comment:
        for line in comment.splitlines():
            buf.write(f"# {line}\n")
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(header)
    for r in rows:
        w.writerow([_fmt(x) if isinstance(x, float) else x for x in r])
    with open(path, "w", newline="") as fh:
        fh.write(buf.getvalue())
