"""Benchmark screens for leverage, fundamentals and valuation, plus SMA and RSI.

Every "below"/"above" threshold is strict: a value sitting exactly on the
threshold fails.
"""

from __future__ import annotations

import datetime as dt
import math
from dataclasses import dataclass, fields
from enum import Enum

import numpy as np

from .errors import SeriesTooShort, WindowTooLarge
from .ingest import FirmPanel, PriceSeries


class ScreenStatus(str, Enum):
    PASS = "Pass"
    FAIL = "Fail"
    NOT_EVALUABLE = "NotEvaluable"


@dataclass(frozen=True)
class BenchmarkInputs:
    der: float | None = None
    debt_to_assets: float | None = None
    interest_coverage: float | None = None
    dscr: float | None = None
    wacc: float | None = None
    roi: float | None = None
    revenue_growth: float | None = None
    net_profit_margin: float | None = None
    roe: float | None = None
    pe: float | None = None
    ps: float | None = None
    dividend_yield: float | None = None
    peg: float | None = None

    def __post_init__(self):
        for f in fields(self):
            v = getattr(self, f.name)
            if v is not None and not math.isfinite(v):
                raise ValueError(f"{f.name} must be finite or missing")

    def missing_count(self) -> int:
        """Missing screen inputs; WACC and ROI form one comparison."""
        singles = [f.name for f in fields(self) if f.name not in ("wacc", "roi")]
        n = sum(getattr(self, name) is None for name in singles)
        return n + (self.wacc is None or self.roi is None)


@dataclass(frozen=True)
class Benchmark:
    name: str
    field: str
    direction: str  # "below" | "above"
    threshold: float | None  # None: compare against another input (WACC vs ROI)
    text: str
    table: str


# Table 8: capital structure variables
CAPITAL_STRUCTURE = (
    Benchmark("Debt to Equity Ratio", "der", "below", 1.5, "Below 1.5 is considered good", "8"),
    Benchmark("Debt to Asset Ratio", "debt_to_assets", "below", 0.6, "Below 0.6 is considered good", "8"),
    Benchmark("Interest Coverage Ratio", "interest_coverage", "above", 1.5, "Above 1.5 is considered good", "8"),
    Benchmark("Debt Service Coverage Ratio", "dscr", "above", 1.0, "Above 1 is considered good", "8"),
    Benchmark("Weighted Average Cost of Capital", "wacc", "below", None, "Below ROI is considered good", "8"),
)
# Table 7: fundamental analysis. Its debt-to-equity row is left to the
# capital-structure screen above so each input drives one row.
FUNDAMENTAL = (
    Benchmark("Revenue Growth Rate", "revenue_growth", "above", 0.10, "Above 10% annually is considered good", "7"),
    Benchmark("Net Profit Margin", "net_profit_margin", "above", 0.15, "Above 15% is considered good", "7"),
    Benchmark("Return on Equity", "roe", "above", 0.15, "Above 15% is considered good", "7"),
)
# Table 7: quantitative analysis
QUANTITATIVE = (
    Benchmark("Price to Earnings Ratio", "pe", "below", 20.0, "Below 20 is considered good", "7"),
    Benchmark("Price to Sales Ratio", "ps", "below", 2.0, "Below 2 is considered good", "7"),
    Benchmark("Dividend Yield", "dividend_yield", "above", 0.02, "Above 2% is considered good", "7"),
    Benchmark("Price to Earnings Growth", "peg", "below", 1.0, "Below 1 is considered good", "7"),
)
QUALITATIVE = (
    ("Carbon foot print", "manual assessment required"),
    ("Labour practices", "manual assessment required"),
    ("Board diversity", "manual assessment required"),
)


@dataclass(frozen=True)
class ScreenResult:
    name: str
    value: float | None
    threshold: str
    status: ScreenStatus
    table: str


def _evaluate(b: Benchmark, inputs: BenchmarkInputs) -> ScreenResult:
    value = getattr(inputs, b.field)
    limit = b.threshold
    if limit is None:
        limit = inputs.roi
    if value is None or limit is None:
        return ScreenResult(b.name, value, b.text, ScreenStatus.NOT_EVALUABLE, b.table)
    good = value < limit if b.direction == "below" else value > limit
    return ScreenResult(b.name, value, b.text, ScreenStatus.PASS if good else ScreenStatus.FAIL, b.table)


def screen_ratios(inputs: BenchmarkInputs) -> list[ScreenResult]:
    """Capital-structure rows followed by the fundamental-analysis rows."""
    return [_evaluate(b, inputs) for b in CAPITAL_STRUCTURE + FUNDAMENTAL]


def screen_quant(inputs: BenchmarkInputs) -> list[ScreenResult]:
    return [_evaluate(b, inputs) for b in QUANTITATIVE]


def _div(a: float | None, b: float | None) -> float | None:
    if a is None or b is None or b == 0:
        return None
    return a / b


def inputs_from_panel(
    panel: FirmPanel, wacc: float | None = None, roi: float | None = None
) -> BenchmarkInputs:
    """Benchmark inputs for the panel's latest fiscal year.

    DSCR uses EBIT as net operating income. PEG divides P/E by EPS growth in
    percent and is missing unless that growth is positive.
    """
    cur = panel.records[-1]
    prev = panel.records[-2] if len(panel) > 1 else None
    revenue_growth = eps_growth = None
    if prev is not None:
        revenue_growth = _div(cur.revenue - prev.revenue, abs(prev.revenue))
        eps_growth = _div(cur.eps - prev.eps, abs(prev.eps))
    pe = _div(cur.price_year_end, cur.eps)
    peg = None
    if pe is not None and eps_growth is not None and eps_growth > 0:
        peg = pe / (eps_growth * 100.0)
    return BenchmarkInputs(
        der=_div(cur.total_debt, cur.equity),
        debt_to_assets=_div(cur.total_debt, cur.total_assets),
        interest_coverage=_div(cur.ebit, cur.interest_expense),
        dscr=_div(cur.ebit, cur.debt_service),
        wacc=wacc,
        roi=roi,
        revenue_growth=revenue_growth,
        net_profit_margin=_div(cur.net_income, cur.revenue),
        roe=_div(cur.net_income, cur.equity),
        pe=pe,
        ps=_div(cur.price_year_end, cur.sales_per_share),
        dividend_yield=_div(cur.dividends_per_share, cur.price_year_end),
        peg=peg,
    )


# --- technical indicators --------------------------------------------------

def moving_average(prices: PriceSeries, window: int) -> list[tuple[dt.date, float]]:
    """Trailing simple moving average, one value per full window."""
    if window < 1:
        raise ValueError("window must be positive")
    n = len(prices)
    if n < window:
        raise WindowTooLarge(f"window {window} exceeds {n} observations")
    closes = np.asarray(prices.closes, dtype=float)
    sums = np.convolve(closes, np.ones(window), mode="valid")
    averages = sums / window
    # rounding can push the mean of a flat window off its value
    for i in range(averages.size):
        seg = closes[i:i + window]
        averages[i] = min(max(averages[i], seg.min()), seg.max())
    return list(zip(prices.dates[window - 1:], averages.tolist()))


def rsi_regime(value: float) -> str:
    if value > 70:
        return "Overbought"
    if value < 30:
        return "Oversold"
    return "Neutral"


@dataclass(frozen=True)
class RSIResult:
    values: list[tuple[dt.date, float]]
    label: str  # regime of the latest value


def rsi(prices: PriceSeries, period: int = 14) -> RSIResult:
    """Wilder's relative strength index.

    Seeds with the simple mean of the first ``period`` gains and losses,
    then smooths avg = (avg * (period - 1) + current) / period. A flat
    window (no gains, no losses) reads 50.
    """
    if period < 1:
        raise ValueError("period must be positive")
    closes = prices.closes
    if len(closes) < period + 1:
        raise SeriesTooShort(f"RSI({period}) needs {period + 1} prices, got {len(closes)}")
    changes = [b - a for a, b in zip(closes, closes[1:])]
    gains = [max(c, 0.0) for c in changes]
    losses = [max(-c, 0.0) for c in changes]
    avg_gain = sum(gains[:period]) / period
    avg_loss = sum(losses[:period]) / period
    dates = prices.dates
    out = [(dates[period], _rsi_value(avg_gain, avg_loss))]
    for i in range(period, len(changes)):
        avg_gain = (avg_gain * (period - 1) + gains[i]) / period
        avg_loss = (avg_loss * (period - 1) + losses[i]) / period
        out.append((dates[i + 1], _rsi_value(avg_gain, avg_loss)))
    return RSIResult(out, rsi_regime(out[-1][1]))


def _rsi_value(avg_gain: float, avg_loss: float) -> float:
    if avg_loss == 0.0:
        return 50.0 if avg_gain == 0.0 else 100.0
    if avg_gain == 0.0:
        return 0.0
    return 100.0 - 100.0 / (1.0 + avg_gain / avg_loss)
