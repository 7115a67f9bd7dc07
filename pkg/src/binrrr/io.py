"""CSV ingestion and serialization, response coding, and config files."""

from __future__ import annotations

import csv
import math
from pathlib import Path

import numpy as np

from .exceptions import InvalidInputError
from .model import Responses


class CsvFormatError(InvalidInputError):
    """Malformed CSV content; the message names the offending row/column (1-based)."""


def _read_rows(path) -> list[list[str]]:
    path = Path(path)
    if not path.exists():
        raise CsvFormatError(f"{path}: file not found")
    with open(path, newline="", encoding="utf-8") as fh:
        rows = [[cell.strip() for cell in row] for row in csv.reader(fh)]
    rows = [row for row in rows if any(row)]
    if not rows:
        raise CsvFormatError(f"{path}: empty file")
    width = len(rows[0])
    for i, row in enumerate(rows, start=1):
        if len(row) != width:
            raise CsvFormatError(f"{path}: row {i} has {len(row)} columns, expected {width}")
    return rows


def _is_number(cell: str) -> bool:
    try:
        float(cell)
    except ValueError:
        return False
    return True


def _drop_header(rows, missing_tokens=()):
    first = rows[0]
    if all(c and c not in missing_tokens and not _is_number(c) for c in first):
        return rows[1:], 1
    return rows, 0


def read_design_csv(path) -> np.ndarray:
    """Numeric ``n x p`` matrix; a non-numeric first row is taken as a header."""
    rows, offset = _drop_header(_read_rows(path))
    if not rows:
        raise CsvFormatError(f"{path}: header but no data rows")
    out = np.empty((len(rows), len(rows[0])))
    for i, row in enumerate(rows):
        for j, cell in enumerate(row):
            try:
                value = float(cell)
            except ValueError:
                raise CsvFormatError(
                    f"{path}: non-numeric cell {cell!r} at row {i + 1 + offset} column {j + 1}"
                ) from None
            if not math.isfinite(value):
                raise CsvFormatError(f"{path}: non-finite value at row {i + 1 + offset} column {j + 1}")
            out[i, j] = value
    return out


def read_response_csv(path, coding: str = "native", threshold: float = 0.0, missing_token: str = "NA") -> Responses:
    """Read labels under exactly one coding rule.

    ``native``: cells are -1 or 1. ``zero-one``: cells are 0 or 1, mapped to
    -1/+1. ``threshold``: numeric cells above ``threshold`` become +1, the
    rest -1 (``threshold=0`` turns counts into presence/absence).
    Empty cells and ``missing_token`` are unobserved.
    """
    if coding not in ("native", "zero-one", "threshold"):
        raise InvalidInputError(f"unknown response coding {coding!r}")
    rows, offset = _drop_header(_read_rows(path), (missing_token,))
    if not rows:
        raise CsvFormatError(f"{path}: header but no data rows")
    values = np.zeros((len(rows), len(rows[0])), dtype=np.int8)
    mask = np.zeros(values.shape, dtype=bool)
    for i, row in enumerate(rows):
        for j, cell in enumerate(row):
            where = f"row {i + 1 + offset} column {j + 1}"
            if cell == "" or cell == missing_token:
                continue
            try:
                x = float(cell)
            except ValueError:
                raise CsvFormatError(f"{path}: non-numeric cell {cell!r} at {where}") from None
            if coding == "native":
                if x not in (-1.0, 1.0):
                    raise CsvFormatError(f"{path}: {cell!r} at {where} is not -1 or 1 (native coding)")
                label = int(x)
            elif coding == "zero-one":
                if x not in (0.0, 1.0):
                    raise CsvFormatError(f"{path}: {cell!r} at {where} is not 0 or 1 (zero-one coding)")
                label = 1 if x == 1.0 else -1
            else:
                if not math.isfinite(x):
                    raise CsvFormatError(f"{path}: non-finite value at {where}")
                label = 1 if x > threshold else -1
            values[i, j] = label
            mask[i, j] = True
    return Responses(values, mask)


def format_float(x: float) -> str:
    return format(float(x), ".17g")


def write_matrix_csv(path, A, header=None) -> None:
    """Plain CSV, 17 significant digits for floats, ``\\n`` line endings."""
    A = np.asarray(A)
    fmt = str if np.issubdtype(A.dtype, np.integer) else format_float
    with open(path, "w", newline="", encoding="utf-8") as fh:
        if header:
            fh.write(",".join(header) + "\n")
        for row in A:
            fh.write(",".join(fmt(v) for v in row) + "\n")


def read_matrix_csv(path) -> np.ndarray:
    return read_design_csv(path)


write_coefficients = write_matrix_csv
read_coefficients = read_matrix_csv


def write_responses_csv(path, Y: Responses, missing_token: str = "NA") -> None:
    with open(path, "w", newline="", encoding="utf-8") as fh:
        for vals, obs in zip(Y.values, Y.mask):
            fh.write(",".join(str(int(v)) if o else missing_token for v, o in zip(vals, obs)) + "\n")


def write_records_csv(path, records: list[dict], columns: list[str]) -> None:
    with open(path, "w", newline="", encoding="utf-8") as fh:
        fh.write(",".join(columns) + "\n")
        for rec in records:
            cells = []
            for col in columns:
                v = rec[col]
                if isinstance(v, bool):
                    cells.append(str(v).lower())
                elif isinstance(v, float):
                    cells.append(format_float(v))
                else:
                    cells.append(str(v))
            fh.write(",".join(cells) + "\n")


def read_config_file(path) -> dict[str, str]:
    """Parse ``key = value`` lines; ``#`` starts a comment."""
    out = {}
    with open(path, encoding="utf-8") as fh:
        for lineno, raw in enumerate(fh, start=1):
            line = raw.split("#", 1)[0].strip()
            if not line:
                continue
            if "=" not in line:
                raise InvalidInputError(f"{path}:{lineno}: expected 'key = value'")
            key, value = (s.strip() for s in line.split("=", 1))
            out[key.replace("-", "_")] = value
    return out
