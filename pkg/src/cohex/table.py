"""Result tables with metadata, CSV/JSON emission, and CSV parsing.

Every sweep and map in this package produces a ``SweepTable``: named
columns, rows of floats (or ``None`` where a cell was flagged instead of
computed), and a flat string-to-string metadata mapping that is echoed
into every emitted file.  CSV output carries the metadata as ``#``
comment lines before the header; JSON output carries it under a "meta"
key.  Emission is deterministic: equal tables produce identical bytes.
"""

from __future__ import annotations

import io
import json
from dataclasses import dataclass, field

import numpy as np

from .errors import DomainError

STATUS_COLUMN = "status"
STATUS_OK = "ok"

# 17 significant digits: enough for exact float64 round trips.
_FLOAT_FORMAT = ".16e"


@dataclass
class SweepTable:
    """Columns, rows, and metadata of one sweep or map run.

    Numeric cells are floats; a flagged cell is ``None`` and the reason
    lives in the row's status column.  The status column (if present)
    holds strings, ``"ok"`` for clean cells or a ``;``-joined flag list.
    """

    columns: tuple
    rows: list
    meta: dict = field(default_factory=dict)

    def __post_init__(self):
        self.columns = tuple(str(c) for c in self.columns)
        if len(set(self.columns)) != len(self.columns):
            raise DomainError("duplicate column names in table")
        clean = []
        for row in self.rows:
            row = tuple(row)
            if len(row) != len(self.columns):
                raise DomainError(
                    "row width %d does not match %d columns"
                    % (len(row), len(self.columns))
                )
            cells = []
            for name, cell in zip(self.columns, row):
                if name == STATUS_COLUMN:
                    cells.append(str(cell))
                elif cell is None:
                    cells.append(None)
                else:
                    v = float(cell)
                    if not np.isfinite(v):
                        raise DomainError(
                            "non-finite value in column %r; flag the cell instead"
                            % name
                        )
                    cells.append(v)
            clean.append(tuple(cells))
        self.rows = clean
        self.meta = {str(k): str(v) for k, v in self.meta.items()}

    def column(self, name) -> list:
        """All cells of one column, in row order."""
        try:
            i = self.columns.index(name)
        except ValueError:
            raise DomainError("no column named %r" % (name,)) from None
        return [row[i] for row in self.rows]

    def all_ok(self) -> bool:
        """True when no row carries a flag (or there is no status column)."""
        if STATUS_COLUMN not in self.columns:
            return True
        return all(s == STATUS_OK for s in self.column(STATUS_COLUMN))


def _format_cell(cell) -> str:
    if cell is None:
        return ""
    if isinstance(cell, str):
        return cell
    return format(cell, _FLOAT_FORMAT)


def emit_csv(table: SweepTable) -> bytes:
    """Render a table as CSV with a '#'-prefixed metadata preamble."""
    out = io.StringIO()
    for key, value in table.meta.items():
        out.write("# %s = %s\n" % (key, value))
    out.write(",".join(table.columns) + "\n")
    for row in table.rows:
        out.write(",".join(_format_cell(c) for c in row) + "\n")
    return out.getvalue().encode("utf-8")


def emit_json(table: SweepTable) -> bytes:
    """Render a table as one JSON object with "meta" and "rows" keys."""
    meta = dict(table.meta)
    meta["columns"] = list(table.columns)
    payload = {"meta": meta, "rows": [list(row) for row in table.rows]}
    return (json.dumps(payload, indent=1) + "\n").encode("utf-8")


def emit(table: SweepTable, format: str) -> bytes:
    """Dispatch on output format name ("csv" or "json")."""
    if format == "csv":
        return emit_csv(table)
    if format == "json":
        return emit_json(table)
    raise DomainError("unknown output format %r (expected csv or json)" % (format,))


def parse_csv(data: bytes) -> SweepTable:
    """Inverse of emit_csv; emit_csv(parse_csv(b)) == b for our own output."""
    meta: dict = {}
    columns = None
    rows = []
    for line in data.decode("utf-8").splitlines():
        if not line:
            continue
        if line.startswith("#"):
            body = line[1:].strip()
            if " = " in body:
                key, value = body.split(" = ", 1)
                meta[key.strip()] = value
            continue
        cells = line.split(",")
        if columns is None:
            columns = tuple(cells)
            continue
        row = []
        for name, cell in zip(columns, cells):
            if name == STATUS_COLUMN:
                row.append(cell)
            elif cell == "":
                row.append(None)
            else:
                row.append(float(cell))
        rows.append(tuple(row))
    if columns is None:
        raise DomainError("CSV data has no header row")
    return SweepTable(columns, rows, meta)
