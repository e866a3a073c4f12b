"""Column-table CSV files with '#'-prefixed metadata headers.

All result files in the package share one format: any number of metadata
lines '# key: value', one header row naming the columns, then comma-separated
numeric rows written with full repr precision so identical results are
byte-identical on disk.
"""

from __future__ import annotations

from pathlib import Path
from typing import Mapping, Sequence

import numpy as np

__all__ = ["write_table", "read_table"]


def write_table(
    path,
    columns: Mapping[str, Sequence[float]],
    metadata: Mapping[str, object] | None = None,
) -> None:
    """Write named columns (equal length) with optional metadata lines."""
    names = list(columns)
    arrays = [np.asarray(columns[n], dtype=float) for n in names]
    if not arrays:
        raise ValueError("need at least one column")
    length = len(arrays[0])
    for name, arr in zip(names, arrays):
        if arr.ndim != 1 or len(arr) != length:
            raise ValueError(f"column {name!r} is not a 1-d array of length {length}")
    lines = []
    for key, value in (metadata or {}).items():
        text = repr(value) if isinstance(value, float) else str(value)
        if "\n" in text:
            raise ValueError(f"metadata value for {key!r} spans multiple lines")
        lines.append(f"# {key}: {text}")
    lines.append(",".join(names))
    for row in zip(*arrays):
        lines.append(",".join(repr(float(x)) for x in row))
    Path(path).write_text("\n".join(lines) + "\n")


def read_table(path) -> tuple[dict, dict]:
    """Read a table written by write_table; returns (metadata, columns)."""
    metadata: dict = {}
    header = None
    rows = []
    for line in Path(path).read_text().splitlines():
        line = line.strip()
        if not line:
            continue
        if line.startswith("#"):
            body = line[1:].strip()
            if ":" in body:
                key, _, value = body.partition(":")
                metadata[key.strip()] = value.strip()
            continue
        if header is None:
            header = [name.strip() for name in line.split(",")]
            continue
        rows.append([float(x) for x in line.split(",")])
    if header is None:
        raise ValueError(f"{path}: no header row found")
    data = np.asarray(rows, dtype=float).reshape(len(rows), len(header))
    columns = {name: data[:, i] for i, name in enumerate(header)}
    return metadata, columns
