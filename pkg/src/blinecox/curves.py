"""Long-format curve tables with reproducibility metadata.

One table holds any number of named series sampled on per-row x values,
with optional confidence bounds.  The metadata block echoes every
parameter needed to regenerate the numbers bit-exactly (model and radio
parameters, seeds, grid, tool version) and travels with the data through
both the CSV and JSON serializations, which round-trip losslessly.
"""

from __future__ import annotations

import csv
import io
import json
import math
from dataclasses import dataclass, field

import numpy as np

__all__ = ["SCHEMA_VERSION", "CurveTable"]

SCHEMA_VERSION = 1

_COLUMNS = ("series", "x", "y", "ci_low", "ci_high")


def _col(values, n: int) -> np.ndarray:
    if values is None:
        return np.full(n, np.nan)
    arr = np.asarray(values, dtype=float)
    if arr.shape != (n,):
        raise ValueError("column length mismatch: %s vs %d rows" % (arr.shape, n))
    return arr


@dataclass
class CurveTable:
    """Rows of (series, x, y, ci_low, ci_high) plus a metadata mapping."""

    series: list[str]
    x: np.ndarray
    y: np.ndarray
    ci_low: np.ndarray | None = None
    ci_high: np.ndarray | None = None
    metadata: dict = field(default_factory=dict)

    def __post_init__(self) -> None:
        n = len(self.series)
        self.series = [str(s) for s in self.series]
        self.x = _col(self.x, n)
        self.y = _col(self.y, n)
        self.ci_low = _col(self.ci_low, n)
        self.ci_high = _col(self.ci_high, n)
        self.metadata = dict(self.metadata)
        self.metadata.setdefault("schema_version", SCHEMA_VERSION)

    def __len__(self) -> int:
        return len(self.series)

    def series_names(self) -> list[str]:
        seen = dict.fromkeys(self.series)
        return list(seen)

    def select(self, name: str) -> tuple[np.ndarray, np.ndarray]:
        mask = np.asarray([s == name for s in self.series])
        return self.x[mask], self.y[mask]

    def __eq__(self, other) -> bool:
        if not isinstance(other, CurveTable):
            return NotImplemented
        def same(a, b):
            return np.array_equal(a, b, equal_nan=True)
        return (
            self.series == other.series
            and same(self.x, other.x)
            and same(self.y, other.y)
            and same(self.ci_low, other.ci_low)
            and same(self.ci_high, other.ci_high)
            and self.metadata == other.metadata
        )

    # CSV: '#'-prefixed metadata header (one JSON value per key), then a
    # standard comma-separated table.  repr() of floats keeps round-trips
    # exact.
    def to_csv(self) -> str:
        buf = io.StringIO()
        for key in sorted(self.metadata):
            buf.write("# %s: %s\n" % (key, json.dumps(self.metadata[key])))
        writer = csv.writer(buf, lineterminator="\n")
        writer.writerow(_COLUMNS)
        for i in range(len(self)):
            writer.writerow(
                [
                    self.series[i],
                    repr(float(self.x[i])),
                    repr(float(self.y[i])),
                    repr(float(self.ci_low[i])),
                    repr(float(self.ci_high[i])),
                ]
            )
        return buf.getvalue()

    @classmethod
    def from_csv(cls, text: str) -> "CurveTable":
        metadata = {}
        rows = []
        lines = text.splitlines()
        body = []
        for line in lines:
            if line.startswith("#"):
                key, _, value = line[1:].partition(":")
                metadata[key.strip()] = json.loads(value)
            elif line.strip():
                body.append(line)
        reader = csv.reader(body)
        header = next(reader)
        if tuple(header) != _COLUMNS:
            raise ValueError("unexpected header %r" % (header,))
        for row in reader:
            rows.append(row)
        return cls(
            series=[r[0] for r in rows],
            x=[float(r[1]) for r in rows],
            y=[float(r[2]) for r in rows],
            ci_low=[float(r[3]) for r in rows],
            ci_high=[float(r[4]) for r in rows],
            metadata=metadata,
        )

    def to_json(self) -> str:
        def enc(arr):
            return [None if math.isnan(v) else v for v in arr.tolist()]
        return json.dumps(
            {
                "metadata": {k: self.metadata[k] for k in sorted(self.metadata)},
                "columns": {
                    "series": self.series,
                    "x": self.x.tolist(),
                    "y": self.y.tolist(),
                    "ci_low": enc(self.ci_low),
                    "ci_high": enc(self.ci_high),
                },
            },
            indent=2,
        )

    @classmethod
    def from_json(cls, text: str) -> "CurveTable":
        doc = json.loads(text)
        cols = doc["columns"]
        def dec(values):
            return [math.nan if v is None else v for v in values]
        return cls(
            series=cols["series"],
            x=cols["x"],
            y=cols["y"],
            ci_low=dec(cols["ci_low"]),
            ci_high=dec(cols["ci_high"]),
            metadata=doc["metadata"],
        )
