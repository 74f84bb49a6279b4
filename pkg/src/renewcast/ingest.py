"""CSV ingestion and drop-don't-impute column cleaning."""

from __future__ import annotations

import csv
import io
import math
import os
from dataclasses import dataclass, field
from typing import Iterable

import numpy as np

from renewcast.exceptions import EmptyDatasetError, ParseError
from renewcast.series import TimeSeries

DEFAULT_SENTINELS = ("", "NA", "N/A", "..", "-")
DEFAULT_MIN_LENGTH = 10

REASON_MISSING = "missing values"
REASON_SHORT = "too short"


@dataclass(frozen=True)
class RawTable:
    """Parsed table: one integer period per row, ``None`` for missing cells."""

    header: tuple[str, ...]
    years: tuple[int, ...]
    rows: tuple[tuple[float | None, ...], ...]
    source_path: str = ""

    @property
    def columns(self) -> tuple[str, ...]:
        return self.header[1:]

    def column(self, name: str) -> list[float | None]:
        j = self.columns.index(name)
        return [row[j] for row in self.rows]

    @classmethod
    def from_series(cls, series: dict[str, TimeSeries], period_name: str = "year") -> "RawTable":
        """Rebuild a table from aligned series (used to re-clean a cleaned dataset)."""
        if not series:
            raise ValueError("no series given")
        first = next(iter(series.values()))
        years = tuple(int(p) for p in first.periods)
        for name, ts in series.items():
            if tuple(int(p) for p in ts.periods) != years:
                raise ValueError(f"series {name!r} is not aligned with the others")
        names = tuple(series)
        rows = tuple(tuple(float(series[c].values[i]) for c in names) for i in range(len(years)))
        return cls(header=(period_name,) + names, years=years, rows=rows)


@dataclass(frozen=True)
class CleanReport:
    kept_columns: tuple[str, ...]
    dropped_columns: tuple[tuple[str, str], ...]
    year_range: tuple[int, int]
    source_path: str = ""

    def to_dict(self) -> dict:
        return {
            "kept_columns": list(self.kept_columns),
            "dropped_columns": [{"name": n, "reason": r} for n, r in self.dropped_columns],
            "year_range": list(self.year_range),
            "source_path": self.source_path,
        }


def _read_text(source) -> tuple[str, str]:
    if isinstance(source, (bytes, bytearray)):
        return bytes(source).decode("utf-8-sig"), ""
    path = os.fspath(source)
    with open(path, encoding="utf-8-sig", newline="") as fh:
        return fh.read(), path


def parse_csv(source, sentinels: Iterable[str] = DEFAULT_SENTINELS) -> RawTable:
    """Parse a period-indexed CSV.

    ``source`` is a filesystem path or raw bytes. The first column holds
    integer periods (years), which must be strictly increasing. Cells equal
    to one of ``sentinels`` (after stripping whitespace), as well as
    non-finite numbers, become ``None``.

    Raises
    ------
    ParseError
        On ragged rows, bad or non-monotone periods, or unparseable cells.
    OSError
        If ``source`` is a path that cannot be read.
    """
    text, path = _read_text(source)
    missing = {s.strip().upper() for s in sentinels}
    reader = csv.reader(io.StringIO(text))
    header = None
    years: list[int] = []
    rows: list[tuple[float | None, ...]] = []
    for line_no, record in enumerate(reader, start=1):
        if not record or all(not cell.strip() for cell in record):
            continue
        if header is None:
            header = tuple(cell.strip() for cell in record)
            if len(header) < 2:
                raise ParseError("need a period column and at least one data column", row=line_no)
            if len(set(header)) != len(header):
                raise ParseError("duplicate column names in header", row=line_no)
            continue
        if len(record) != len(header):
            raise ParseError(f"expected {len(header)} fields, found {len(record)}", row=line_no)
        raw_year = record[0].strip()
        try:
            year = int(raw_year)
        except ValueError:
            try:
                as_float = float(raw_year)
            except ValueError:
                raise ParseError(f"period {raw_year!r} is not an integer", row=line_no, column=0) from None
            if not as_float.is_integer():
                raise ParseError(f"period {raw_year!r} is not an integer", row=line_no, column=0)
            year = int(as_float)
        if years and year == years[-1]:
            raise ParseError(f"duplicate period {year}", row=line_no, column=0)
        if years and year < years[-1]:
            raise ParseError(f"period {year} follows {years[-1]}; periods must increase", row=line_no, column=0)
        cells: list[float | None] = []
        for j, cell in enumerate(record[1:], start=1):
            token = cell.strip()
            if token.upper() in missing:
                cells.append(None)
                continue
            try:
                value = float(token)
            except ValueError:
                raise ParseError(f"cannot parse {token!r} as a number", row=line_no, column=j) from None
            cells.append(value if math.isfinite(value) else None)
        years.append(year)
        rows.append(tuple(cells))
    if header is None:
        raise ParseError("file is empty")
    if not rows:
        raise ParseError("no data rows")
    return RawTable(header=header, years=tuple(years), rows=tuple(rows), source_path=path)


def clean(table: RawTable, min_length: int = DEFAULT_MIN_LENGTH) -> tuple[dict[str, TimeSeries], CleanReport]:
    """Keep only columns that are complete over the table's period span.

    A column is dropped if any cell is missing or if the span holds fewer
    than ``min_length`` observations. Survivors become :class:`TimeSeries`
    named after their column. Cadence is inferred from the period labels,
    which must then be evenly spaced.

    Raises
    ------
    EmptyDatasetError
        When no column survives; the exception carries the report.
    """
    years = table.years
    span = (years[0], years[-1])
    steps = set(np.diff(years).tolist())
    if len(steps) > 1:
        raise ParseError(f"periods are not evenly spaced (steps {sorted(steps)})")
    cadence = steps.pop() if steps else 1

    kept: dict[str, TimeSeries] = {}
    dropped: list[tuple[str, str]] = []
    for j, name in enumerate(table.columns):
        cells = [row[j] for row in table.rows]
        if any(c is None for c in cells):
            dropped.append((name, REASON_MISSING))
        elif len(cells) < min_length:
            dropped.append((name, REASON_SHORT))
        else:
            kept[name] = TimeSeries(cells, start_period=years[0], cadence=cadence, name=name)

    report = CleanReport(
        kept_columns=tuple(kept),
        dropped_columns=tuple(dropped),
        year_range=span,
        source_path=table.source_path,
    )
    if not kept:
        raise EmptyDatasetError("every column was dropped during cleaning", report=report)
    return kept, report


def load_series(source, columns=None, sentinels=DEFAULT_SENTINELS, min_length=DEFAULT_MIN_LENGTH):
    """Parse and clean ``source``, optionally restricting to ``columns``."""
    table = parse_csv(source, sentinels=sentinels)
    series, report = clean(table, min_length=min_length)
    if columns:
        unknown = [c for c in columns if c not in table.columns]
        if unknown:
            raise KeyError(f"unknown column(s): {', '.join(unknown)}")
        series = {c: series[c] for c in columns if c in series}
    return series, report
