"""Delimited and matrix writers for sweep results."""

from __future__ import annotations

import csv
import io
import math
import sys
from contextlib import contextmanager
from pathlib import Path
from typing import Any, TextIO

import numpy as np

from .sweep import COLUMN_DOCS, SweepResult

__all__ = ["format_value", "write_csv", "write_matrix", "render_csv"]


def format_value(value: Any) -> str:
    """17 significant digits for floats so values round-trip exactly."""
    if isinstance(value, (bool, np.bool_)):
        return "true" if value else "false"
    if isinstance(value, (int, np.integer)):
        return str(int(value))
    if isinstance(value, (float, np.floating)):
        if math.isnan(value):
            return "nan"
        return format(float(value), ".17g")
    return str(value)


@contextmanager
def _open(path: str | Path | None):
    if path is None or str(path) == "-":
        yield sys.stdout
        return
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    with path.open("w", newline="") as fh:
        yield fh


def _write_csv(result: SweepResult, fh: TextIO) -> None:
    docs = "; ".join(f"{c}: {COLUMN_DOCS.get(c, 'swept parameter')}" for c in result.columns)
    fh.write(f"# {docs}\n")
    writer = csv.writer(fh, lineterminator="\n")
    writer.writerow(result.columns)
    for row in result.rows:
        writer.writerow([format_value(row.get(c, "")) for c in result.columns])


def write_csv(result: SweepResult, path: str | Path | None = None) -> None:
    """Long-format CSV, one row per grid point, preceded by a ``#`` column-doc line."""
    with _open(path) as fh:
        _write_csv(result, fh)


def render_csv(result: SweepResult) -> str:
    buf = io.StringIO()
    _write_csv(result, buf)
    return buf.getvalue()


def write_matrix(result: SweepResult, path: str | Path | None = None, quantity: str = "concurrence") -> None:
    """gnuplot ``nonuniform matrix`` text: first row ``ny x0 x1 ...`` then ``y_i z_i0 z_i1 ...``.

    x is the second sweep axis and y the first, matching the row-major CSV order.
    """
    cfg = result.config
    if len(cfg.axes) != 2:
        raise ValueError("matrix output needs a two-axis sweep")
    ya, xa = cfg.axes
    z = result.grid(quantity)
    with _open(path) as fh:
        fh.write(f"# {quantity}; rows: {ya.name}, columns: {xa.name}\n")
        fh.write(" ".join([str(len(xa.values))] + [format_value(x) for x in xa.values]) + "\n")
        for y, zrow in zip(ya.values, z):
            fh.write(" ".join([format_value(y)] + [format_value(v) for v in zrow]) + "\n")
