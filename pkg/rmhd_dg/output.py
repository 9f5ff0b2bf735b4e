"""
CSV emission for field dumps, histories and error tables.

Every file is written whole through a temporary file and an atomic
replace, so a crashed run never leaves a half-written table behind.
Floats are printed with 17 significant digits for bit-reproducible output.
"""
from __future__ import annotations

import csv
import io
from pathlib import Path
from typing import Iterable, Sequence

import numpy as np

from .dg.physics import PRIM_NAMES, lorentz_factor

FIELD_COLUMNS = PRIM_NAMES + ("gamma",)
TROUBLED_COLUMNS = ("t", "count", "fraction")
TROUBLED_CENTRAL_COLUMNS = TROUBLED_COLUMNS + ("dual_count", "dual_fraction", "edge_count")
DIVERGENCE_COLUMNS = ("t", "max_divergence", "max_jump", "max_compatibility")


def _fmt(value) -> str:
    if value is None:
        return ""
    if isinstance(value, (bool, np.bool_)):
        return str(int(value))
    if isinstance(value, (int, np.integer)):
        return str(int(value))
    if isinstance(value, (float, np.floating)):
        return f"{float(value):.16e}"
    return str(value)


def write_rows(path: Path, header: Sequence[str], rows: Iterable[Sequence]) -> Path:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(header)
    for row in rows:
        writer.writerow([_fmt(v) for v in row])
    tmp = path.with_suffix(path.suffix + ".tmp")
    tmp.write_text(buf.getvalue(), encoding="utf-8")
    tmp.replace(path)
    return path


def write_fields(path: Path, coords: Sequence[np.ndarray], prim: np.ndarray) -> Path:
    """One row per cell centre: x[,y], the primitive variables and gamma.

    2D fields are written row-major over (i, j).
    """
    coord_names = ("x", "y")[: len(coords)]
    prim = np.asarray(prim, dtype=float)
    flat = prim.reshape(-1, prim.shape[-1])
    gamma = lorentz_factor(flat)
    cols = [np.asarray(c, dtype=float).reshape(-1) for c in coords]
    rows = (tuple(c[k] for c in cols) + tuple(flat[k]) + (gamma[k],) for k in range(flat.shape[0]))
    return write_rows(path, coord_names + FIELD_COLUMNS, rows)


def write_troubled_history(path: Path, history: Sequence[dict], central: bool) -> Path:
    columns = TROUBLED_CENTRAL_COLUMNS if central else TROUBLED_COLUMNS
    return write_rows(path, columns, ([rec.get(c) for c in columns] for rec in history))


def write_divergence_history(path: Path, history: Sequence[dict]) -> Path:
    return write_rows(path, DIVERGENCE_COLUMNS, ([rec.get(c) for c in DIVERGENCE_COLUMNS] for rec in history))


def write_error_table(path: Path, rows: Sequence[dict]) -> Path:
    """Rows of {"N": .., "t": .., "l1_rho": .., ...}; columns from the first row."""
    if not rows:
        return write_rows(path, ("N",), [])
    header = list(rows[0])
    return write_rows(path, header, ([row.get(c) for c in header] for row in rows))


def read_rows(path: Path) -> list[dict[str, str]]:
    with open(path, newline="", encoding="utf-8") as f:
        return list(csv.DictReader(f))
