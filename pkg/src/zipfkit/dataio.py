"""CSV panel ingestion and CCDF export.

The ingestion schema is a comma-delimited, UTF-8, headered file with columns
company_id, year, price, dividends, cash_flow, book_value and an optional
shares_outstanding column.  When shares are present the four value columns
are divided by them (per-share transformation); rows whose values cannot
enter log space are dropped with per-reason accounting.
"""

from __future__ import annotations

import csv
import math
from dataclasses import dataclass

import numpy as np

from .panel import PanelDataset, make_panel
from .tail import ccdf

REQUIRED_COLUMNS = ("company_id", "year", "price", "dividends", "cash_flow", "book_value")
SHARES_COLUMN = "shares_outstanding"

DROP_NON_POSITIVE = "non-positive value"
DROP_NON_FINITE = "non-finite value"
DROP_BAD_SHARES = "non-positive shares"


@dataclass(frozen=True)
class DropReport:
    """Row accounting for one load: total = kept + sum of drops."""

    total_rows: int
    kept_rows: int
    dropped: dict

    @property
    def total_dropped(self) -> int:
        return sum(self.dropped.values())


def _parse_float(cell: str, line: int, column: str) -> float:
    try:
        return float(cell)
    except ValueError:
        raise ValueError(f"line {line}: malformed row ({column}={cell!r})") from None


def load_panel(path) -> tuple[PanelDataset, DropReport]:
    """Parse the panel CSV into log space with a drop report.

    Malformed rows and duplicate (company, year) keys raise with the line
    number; rows with non-positive or non-finite values are dropped and
    counted by reason.  Raises "no usable rows" when nothing survives.
    """
    companies: list = []
    years: list = []
    logs: list = []
    dropped = {DROP_NON_POSITIVE: 0, DROP_NON_FINITE: 0, DROP_BAD_SHARES: 0}
    total = 0
    seen = set()

    with open(path, newline="", encoding="utf-8") as fh:
        reader = csv.reader(fh)
        header = next(reader, None)
        if header is None:
            raise ValueError("no usable rows")
        header = [h.strip() for h in header]
        missing = [c for c in REQUIRED_COLUMNS if c not in header]
        if missing:
            raise ValueError(f"missing column(s): {', '.join(missing)}")
        index = {name: header.index(name) for name in REQUIRED_COLUMNS}
        shares_at = header.index(SHARES_COLUMN) if SHARES_COLUMN in header else None

        for row in reader:
            line = reader.line_num
            if not row or all(not cell.strip() for cell in row):
                continue
            total += 1
            if len(row) < len(header):
                raise ValueError(f"line {line}: malformed row (expected {len(header)} fields)")
            company = row[index["company_id"]].strip()
            if not company:
                raise ValueError(f"line {line}: malformed row (empty company_id)")
            year_cell = row[index["year"]].strip()
            try:
                year = int(year_cell)
            except ValueError:
                raise ValueError(f"line {line}: malformed row (year={year_cell!r})") from None

            values = [_parse_float(row[index[c]], line, c)
                      for c in ("price", "dividends", "cash_flow", "book_value")]
            if shares_at is not None:
                shares = _parse_float(row[shares_at], line, SHARES_COLUMN)
                if not math.isfinite(shares) or shares <= 0.0:
                    dropped[DROP_BAD_SHARES] += 1
                    continue
                values = [v / shares for v in values]
            if any(not math.isfinite(v) for v in values):
                dropped[DROP_NON_FINITE] += 1
                continue
            if any(v <= 0.0 for v in values):
                dropped[DROP_NON_POSITIVE] += 1
                continue

            key = (company, year)
            if key in seen:
                raise ValueError(f"line {line}: duplicate key {key}")
            seen.add(key)
            companies.append(company)
            years.append(year)
            logs.append([math.log(v) for v in values])

    if not companies:
        raise ValueError("no usable rows")
    logs_arr = np.asarray(logs)
    dataset = make_panel(np.asarray(companies, dtype=object), np.asarray(years),
                         logs_arr[:, 0], logs_arr[:, 1:])
    report = DropReport(total_rows=total, kept_rows=len(companies), dropped=dropped)
    return dataset, report


def export_ccdf(values, path) -> None:
    """Write the empirical CCDF as two-column text, 17 significant digits.

    The formatting round-trips float64 exactly, so re-reading the file
    reproduces the in-memory pairs bit for bit.
    """
    pairs = ccdf(values)
    with open(path, "w", encoding="utf-8") as fh:
        for x, p in pairs:
            fh.write(f"{x:.17g} {p:.17g}\n")


def read_values(path) -> np.ndarray:
    """One float per line; blank lines and '#' comments are skipped."""
    out = []
    with open(path, encoding="utf-8") as fh:
        for line_no, line in enumerate(fh, start=1):
            text = line.strip()
            if not text or text.startswith("#"):
                continue
            try:
                out.append(float(text.split()[0]))
            except ValueError:
                raise ValueError(f"line {line_no}: not a number: {text!r}") from None
    if not out:
        raise ValueError("empty sample")
    return np.asarray(out)
