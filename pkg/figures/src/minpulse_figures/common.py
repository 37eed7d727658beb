"""Shared CSV loading and validation for the figure scripts."""
from __future__ import annotations

import csv
import sys
from pathlib import Path

import matplotlib

matplotlib.use("Agg")

VECTOR_SUFFIXES = (".svg", ".pdf", ".eps")


class InputError(ValueError):
    """Malformed or incomplete CSV input."""


def load_columns(path, required: list[str]) -> dict[str, list[str]]:
    """Read a CSV file and return the required columns, raising InputError
    naming the first missing column."""
    p = Path(path)
    if not p.exists():
        raise InputError(f"input file not found: {p}")
    with p.open(newline="") as fh:
        reader = csv.DictReader(fh)
        if reader.fieldnames is None:
            raise InputError(f"{p}: empty file, no header row")
        for col in required:
            if col not in reader.fieldnames:
                raise InputError(f"{p}: missing required column '{col}'")
        rows = list(reader)
    if not rows:
        raise InputError(f"{p}: no data rows")
    return {col: [row[col] for row in rows] for col in required}


def floats(values: list[str], column: str) -> list[float]:
    try:
        return [float(v) for v in values]
    except ValueError as exc:
        raise InputError(f"column '{column}': non-numeric value ({exc})") from None


def check_out_path(path) -> Path:
    p = Path(path)
    if p.suffix.lower() not in VECTOR_SUFFIXES:
        raise InputError(
            f"output must be vector graphics ({'/'.join(VECTOR_SUFFIXES)}), "
            f"got '{p.suffix or '(none)'}'")
    return p


def run_script(worker, argv=None) -> int:
    """Run a script body, mapping InputError to exit code 1."""
    try:
        worker(argv)
        return 0
    except InputError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
