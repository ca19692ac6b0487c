"""Result persistence: JSON documents, versioned CSV tables, run manifests.

All writes are atomic (write to a temporary file in the same directory and
rename) so concurrent runs never observe partial files.  CSV tables start
with a schema comment line; the column order is part of the contract and
only changes together with the schema version.
"""

from __future__ import annotations

import csv
import io
import json
import os
import tempfile
from pathlib import Path

CSV_SCHEMA_VERSION = 1


def atomic_write_text(path: str | Path, text: str) -> None:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    fd, tmp = tempfile.mkstemp(dir=path.parent, prefix=path.name, suffix=".tmp")
    try:
        with os.fdopen(fd, "w") as fh:
            fh.write(text)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def write_json(path: str | Path, document: dict) -> None:
    atomic_write_text(path, json.dumps(document, indent=2, sort_keys=True) + "\n")


def write_table(path: str | Path, kind: str, columns, rows) -> None:
    """CSV with a leading schema comment line and one header row."""
    lines = [f"# spslab-table schema={CSV_SCHEMA_VERSION} kind={kind}"]
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(columns)
    for row in rows:
        writer.writerow([_format_cell(c) for c in row])
    lines.append(buf.getvalue())
    atomic_write_text(path, "\n".join(lines))


def _format_cell(value) -> str:
    if isinstance(value, float):
        return f"{value:.17g}"
    if isinstance(value, bool):
        return "true" if value else "false"
    return str(value)


def read_table(path: str | Path) -> tuple[dict, list[str], list[list[str]]]:
    """Parse a versioned CSV back into (meta, columns, string rows)."""
    path = Path(path)
    with open(path, newline="") as fh:
        first = fh.readline().strip()
        meta: dict = {}
        if first.startswith("#"):
            for token in first.lstrip("# ").split():
                if "=" in token:
                    key, _, value = token.partition("=")
                    meta[key] = value
        reader = csv.reader(fh)
        columns = next(reader)
        rows = [row for row in reader]
    return meta, columns, rows
