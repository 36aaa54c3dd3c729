"""Parsing and validation of annual firm panels and daily price files.

One CSV per firm, one row per fiscal year. Numbers use "." as the only
decimal separator; thousands separators, currency symbols and locale
formats are rejected rather than guessed.
"""

from __future__ import annotations

import csv
import datetime as dt
import io
import math
import re
from dataclasses import dataclass, field, fields, replace
from pathlib import Path

from .errors import DuplicateYear, InvalidRecord, MalformedNumber, MissingColumn

REQUIRED_COLUMNS = (
    "fiscal_year",
    "long_term_debt",
    "total_debt",
    "equity",
    "retained_earnings",
    "total_assets",
    "revenue",
    "total_expenses",
    "ebit",
    "net_income",
    "market_value",
    "eps",
)
OPTIONAL_COLUMNS = (
    "interest_expense",
    "debt_service",
    "dividends_per_share",
    "price_year_end",
    "sales_per_share",
)
CURRENCY_FIELDS = REQUIRED_COLUMNS[1:] + OPTIONAL_COLUMNS
# eps and the per-share optionals are currency per share; they scale with
# the currency unit like every other money column.

_NUMBER = re.compile(r"^[+-]?(?:\d+(?:\.\d*)?|\.\d+)(?:[eE][+-]?\d+)?$")
_INTEGER = re.compile(r"^[+-]?\d+$")


@dataclass(frozen=True)
class AnnualRecord:
    fiscal_year: int
    long_term_debt: float
    total_debt: float
    equity: float
    retained_earnings: float
    total_assets: float
    revenue: float
    total_expenses: float
    ebit: float
    net_income: float
    market_value: float
    eps: float
    interest_expense: float | None = None
    debt_service: float | None = None
    dividends_per_share: float | None = None
    price_year_end: float | None = None
    sales_per_share: float | None = None

    def __post_init__(self):
        if not 1900 <= self.fiscal_year <= 2100:
            raise InvalidRecord(f"fiscal_year {self.fiscal_year} outside [1900, 2100]")
        for name in CURRENCY_FIELDS:
            value = getattr(self, name)
            if value is not None and not math.isfinite(value):
                raise InvalidRecord(f"{self.fiscal_year}: {name} is not finite")

    def scaled(self, c: float) -> AnnualRecord:
        """Copy with every currency field multiplied by ``c``."""
        changes = {}
        for name in CURRENCY_FIELDS:
            value = getattr(self, name)
            changes[name] = None if value is None else value * c
        return replace(self, **changes)


@dataclass(frozen=True)
class FirmPanel:
    firm_id: str
    records: tuple[AnnualRecord, ...]

    def __post_init__(self):
        object.__setattr__(
            self, "records", tuple(sorted(self.records, key=lambda r: r.fiscal_year))
        )

    def __len__(self) -> int:
        return len(self.records)

    @property
    def years(self) -> list[int]:
        return [r.fiscal_year for r in self.records]

    def column(self, name: str) -> list[float | None]:
        return [getattr(r, name) for r in self.records]

    def scaled(self, c: float) -> FirmPanel:
        return FirmPanel(self.firm_id, tuple(r.scaled(c) for r in self.records))


@dataclass(frozen=True)
class PriceSeries:
    firm_id: str
    observations: tuple[tuple[dt.date, float], ...]

    def __post_init__(self):
        dates = [d for d, _ in self.observations]
        if any(b <= a for a, b in zip(dates, dates[1:])):
            raise InvalidRecord(f"{self.firm_id}: price dates must be strictly ascending")
        if any(not (p > 0 and math.isfinite(p)) for _, p in self.observations):
            raise InvalidRecord(f"{self.firm_id}: prices must be positive and finite")

    def __len__(self) -> int:
        return len(self.observations)

    @property
    def dates(self) -> list[dt.date]:
        return [d for d, _ in self.observations]

    @property
    def closes(self) -> list[float]:
        return [p for _, p in self.observations]


@dataclass
class Dataset:
    panels: dict[str, FirmPanel] = field(default_factory=dict)
    prices: dict[str, PriceSeries] = field(default_factory=dict)

    def add_panel(self, panel: FirmPanel) -> None:
        if panel.firm_id in self.panels:
            raise InvalidRecord(f"duplicate firm_id {panel.firm_id!r}")
        self.panels[panel.firm_id] = panel

    def add_prices(self, prices: PriceSeries) -> None:
        if prices.firm_id in self.prices:
            raise InvalidRecord(f"duplicate price series for {prices.firm_id!r}")
        self.prices[prices.firm_id] = prices


@dataclass
class Finding:
    code: str
    message: str
    year: int | None = None


@dataclass
class ValidationReport:
    errors: list[Finding] = field(default_factory=list)
    warnings: list[Finding] = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return not self.errors


def parse_number(text: str, row: int, column: str) -> float:
    s = text.strip()
    if not _NUMBER.match(s):
        raise MalformedNumber(row, column, text)
    return float(s)


def _parse_year(text: str, row: int) -> int:
    s = text.strip()
    if not _INTEGER.match(s):
        raise MalformedNumber(row, "fiscal_year", text)
    return int(s)


def parse_panel_csv(text: str, firm_id: str | None = None) -> FirmPanel:
    """Parse one firm's annual panel from CSV text.

    The firm id comes from the ``firm_id`` argument, else from an optional
    ``firm_id`` column (must be constant), else defaults to ``"FIRM"``.
    Empty cells in optional columns become ``None``; empty required cells
    are malformed.
    """
    reader = csv.DictReader(io.StringIO(text.lstrip("﻿")))
    header = [h.strip() for h in (reader.fieldnames or [])]
    reader.fieldnames = header
    for name in REQUIRED_COLUMNS:
        if name not in header:
            raise MissingColumn(name)

    records: list[AnnualRecord] = []
    seen: set[int] = set()
    ids: set[str] = set()
    for i, row in enumerate(reader, start=1):
        if all((v or "").strip() == "" for v in row.values() if isinstance(v, str)):
            continue
        if None in row:
            raise MalformedNumber(i, "<extra>", ",".join(row[None]))
        year = _parse_year(row["fiscal_year"] or "", i)
        if year in seen:
            raise DuplicateYear(year)
        seen.add(year)
        values: dict = {"fiscal_year": year}
        for name in REQUIRED_COLUMNS[1:]:
            values[name] = parse_number(row[name] or "", i, name)
        for name in OPTIONAL_COLUMNS:
            raw = (row.get(name) or "").strip()
            values[name] = parse_number(raw, i, name) if raw else None
        if "firm_id" in header and (row.get("firm_id") or "").strip():
            ids.add(row["firm_id"].strip())
        records.append(AnnualRecord(**values))

    if firm_id is None:
        if len(ids) > 1:
            raise InvalidRecord(f"firm_id column holds several ids: {sorted(ids)}")
        firm_id = ids.pop() if ids else "FIRM"
    return FirmPanel(firm_id, tuple(records))


def serialize_panel_csv(panel: FirmPanel, include_firm_id: bool = True) -> str:
    """Inverse of :func:`parse_panel_csv`; floats are written with ``repr``."""
    columns = list(REQUIRED_COLUMNS) + list(OPTIONAL_COLUMNS)
    if include_firm_id:
        columns = ["firm_id"] + columns
    out = io.StringIO()
    writer = csv.writer(out, lineterminator="\n")
    writer.writerow(columns)
    for rec in panel.records:
        row = []
        for name in columns:
            if name == "firm_id":
                row.append(panel.firm_id)
                continue
            value = getattr(rec, name)
            row.append("" if value is None else repr(value))
        writer.writerow(row)
    return out.getvalue()


def load_panel(path: str | Path, firm_id: str | None = None) -> FirmPanel:
    path = Path(path)
    text = path.read_text(encoding="utf-8")
    panel = parse_panel_csv(text, firm_id)
    if firm_id is None and panel.firm_id == "FIRM":
        panel = FirmPanel(path.stem.upper(), panel.records)
    return panel


def parse_prices_csv(text: str, firm_id: str | None = None) -> PriceSeries:
    reader = csv.DictReader(io.StringIO(text.lstrip("﻿")))
    header = [h.strip() for h in (reader.fieldnames or [])]
    reader.fieldnames = header
    for name in ("date", "close"):
        if name not in header:
            raise MissingColumn(name)
    obs = []
    ids: set[str] = set()
    for i, row in enumerate(reader, start=1):
        raw_date = (row["date"] or "").strip()
        if not raw_date:
            continue
        try:
            day = dt.date.fromisoformat(raw_date)
        except ValueError:
            raise MalformedNumber(i, "date", raw_date) from None
        obs.append((day, parse_number(row["close"] or "", i, "close")))
        if "firm_id" in header and (row.get("firm_id") or "").strip():
            ids.add(row["firm_id"].strip())
    if firm_id is None:
        if len(ids) > 1:
            raise InvalidRecord(f"price file holds several firm ids: {sorted(ids)}")
        firm_id = ids.pop() if ids else "FIRM"
    obs.sort(key=lambda o: o[0])
    return PriceSeries(firm_id, tuple(obs))


def load_prices(path: str | Path, firm_id: str | None = None) -> PriceSeries:
    path = Path(path)
    series = parse_prices_csv(path.read_text(encoding="utf-8"), firm_id)
    if firm_id is None and series.firm_id == "FIRM":
        series = PriceSeries(path.stem.upper(), series.observations)
    return series


def validate_panel(panel: FirmPanel) -> ValidationReport:
    """Check a panel's invariants without raising.

    Errors: duplicate years, non-positive total assets, non-finite values.
    Warnings: gaps between fiscal years, negative equity, negative
    retained earnings.
    """
    report = ValidationReport()
    years = panel.years
    seen: set[int] = set()
    for y in years:
        if y in seen:
            report.errors.append(Finding("DuplicateYear", f"fiscal year {y} repeated", y))
        seen.add(y)
    for a, b in zip(years, years[1:]):
        if b - a > 1:
            report.warnings.append(
                Finding("YearGap", f"no record between {a} and {b}", b)
            )
    for rec in panel.records:
        y = rec.fiscal_year
        if not rec.total_assets > 0:
            report.errors.append(
                Finding("NonPositiveAssets", f"total_assets = {rec.total_assets!r}", y)
            )
        for f in fields(rec):
            v = getattr(rec, f.name)
            if isinstance(v, float) and not math.isfinite(v):
                report.errors.append(Finding("NonFinite", f"{f.name} is not finite", y))
        if rec.equity < 0:
            report.warnings.append(Finding("NegativeEquity", f"equity = {rec.equity!r}", y))
        if rec.retained_earnings < 0:
            report.warnings.append(
                Finding(
                    "NegativeRetainedEarnings",
                    f"retained_earnings = {rec.retained_earnings!r}",
                    y,
                )
            )
    return report
