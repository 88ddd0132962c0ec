"""CSV loading with strict schema validation.

The expected layout is the harness's results schema; any deviation raises
SchemaError naming the offending column so a mismatched file is diagnosed
instead of silently misplotted.
"""

from __future__ import annotations

import csv
from dataclasses import dataclass
from pathlib import Path

SCHEMA = (
    "alpha",
    "trial",
    "method",
    "dist",
    "raw_err",
    "removed_count",
    "realized_kappa",
    "seed",
    "wall_time_ms",
)

_NUMERIC = {"alpha", "dist", "raw_err", "realized_kappa", "wall_time_ms"}
_INTEGER = {"trial", "removed_count", "seed"}


class SchemaError(ValueError):
    """The CSV does not conform to the results schema."""


@dataclass(frozen=True)
class SweepData:
    path: Path
    rows: tuple[dict, ...]

    def methods(self) -> list[str]:
        seen = []
        for row in self.rows:
            if row["method"] not in seen:
                seen.append(row["method"])
        return seen


def load_sweep(path) -> SweepData:
    path = Path(path)
    if not path.exists():
        raise SchemaError(f"{path}: file does not exist")
    with open(path, "r", encoding="utf-8", newline="") as fh:
        reader = csv.DictReader(fh)
        header = tuple(reader.fieldnames or ())
        missing = [col for col in SCHEMA if col not in header]
        if missing:
            raise SchemaError(f"{path}: missing column '{missing[0]}'")
        extra = [col for col in header if col not in SCHEMA]
        if extra:
            raise SchemaError(f"{path}: unexpected column '{extra[0]}'")
        if header != SCHEMA:
            raise SchemaError(f"{path}: column order {header} != {SCHEMA}")
        rows = []
        for line_no, raw in enumerate(reader, start=2):
            row = {}
            for col in SCHEMA:
                value = raw[col]
                if value is None:
                    raise SchemaError(f"{path}:{line_no}: column '{col}' is empty")
                try:
                    if col in _NUMERIC:
                        row[col] = float(value)
                    elif col in _INTEGER:
                        row[col] = int(value)
                    else:
                        row[col] = value
                except ValueError:
                    raise SchemaError(
                        f"{path}:{line_no}: column '{col}' has non-numeric value {value!r}"
                    ) from None
            rows.append(row)
    if not rows:
        raise SchemaError(f"{path}: no data rows")
    return SweepData(path=path, rows=tuple(rows))
