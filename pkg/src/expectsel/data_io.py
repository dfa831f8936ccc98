"""CSV ingestion and fit-report serialization for the command line."""

from __future__ import annotations

import csv
import json
import os

import numpy as np

from .core import Dataset, ExpectileError


class ParseError(ExpectileError):
    pass


class MissingColumn(ParseError):
    pass


class NonNumericCell(ParseError):
    pass


def load_csv(path, response_column) -> Dataset:
    """Load a headered numeric CSV, splitting out the response column.

    ``response_column`` is a header name or a zero-based column index.
    Missing or non-numeric cells are rejected with their location.
    """
    try:
        fh = open(path, newline="")
    except OSError as exc:
        raise ParseError(f"cannot open {path}: {exc}") from exc
    with fh:
        reader = csv.reader(fh)
        try:
            header = next(reader)
        except StopIteration:
            raise ParseError(f"{path}: empty file")
        header = [c.strip() for c in header]
        if isinstance(response_column, int) or (
                isinstance(response_column, str) and response_column.isdigit()
                and response_column not in header):
            idx = int(response_column)
            if not 0 <= idx < len(header):
                raise MissingColumn(
                    f"response column index {idx} out of range (have {len(header)})")
        else:
            try:
                idx = header.index(response_column)
            except ValueError:
                raise MissingColumn(
                    f"response column {response_column!r} not in header")
        rows = []
        for lineno, row in enumerate(reader, start=2):
            if not row:
                continue
            if len(row) != len(header):
                raise ParseError(
                    f"{path}:{lineno}: expected {len(header)} cells, got {len(row)}")
            vals = []
            for colno, cell in enumerate(row):
                cell = cell.strip()
                if cell == "":
                    raise ParseError(
                        f"{path}:{lineno}: blank cell in column "
                        f"{header[colno]!r} (column {colno + 1})")
                try:
                    vals.append(float(cell))
                except ValueError:
                    raise NonNumericCell(
                        f"{path}:{lineno}: non-numeric value {cell!r} in "
                        f"column {header[colno]!r} (column {colno + 1})")
            rows.append(vals)
    if not rows:
        raise ParseError(f"{path}: no data rows")
    table = np.asarray(rows, dtype=float)
    y = table[:, idx]
    x = np.delete(table, idx, axis=1)
    names = tuple(c for i, c in enumerate(header) if i != idx)
    return Dataset(x=x, y=y, feature_names=names)


def write_json(path, payload: dict):
    tmp = f"{path}.tmp"
    with open(tmp, "w") as fh:
        json.dump(payload, fh, indent=2)
        fh.write("\n")
    os.replace(tmp, path)


def write_fit_csv(path, rows: list[dict]):
    tmp = f"{path}.tmp"
    fields = list(rows[0].keys()) if rows else ["feature"]
    with open(tmp, "w", newline="") as fh:
        writer = csv.DictWriter(fh, fieldnames=fields, lineterminator="\n")
        writer.writeheader()
        for row in rows:
            writer.writerow({k: repr(v) if isinstance(v, float) else v
                             for k, v in row.items()})
    os.replace(tmp, path)
