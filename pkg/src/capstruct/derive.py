"""The fourteen analysis variables computed per firm-year.

Levels: MVF (market value), EBIT, ETFR (trend-forecast revenue increment).
Ratios: DER, LTDE, LTDA, LTDR, ROA, ROE.
Year-over-year rates: RTD, REX, RRE, REQ, REPS (first year missing).
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .errors import PanelTooShort, SeriesTooShort
from .ingest import FirmPanel

# Order used by the correlation matrices.
VARIABLES = (
    "MVF", "REX", "RTD", "EBIT", "DER", "ETFR", "RRE", "REQ",
    "LTDR", "LTDE", "LTDA", "ROA", "ROE", "REPS",
)
# Order used by the descriptive tables.
DESCRIPTIVE_ORDER = (
    "MVF", "RTD", "EBIT", "DER", "ETFR", "REX", "RRE", "REQ",
    "LTDR", "LTDE", "LTDA", "ROA", "ROE", "REPS",
)
LEVELS = ("MVF", "EBIT", "ETFR")
RATIOS = ("DER", "LTDE", "LTDA", "LTDR", "ROA", "ROE")
RATES = ("RTD", "REX", "RRE", "REQ", "REPS")

METHOD_NOTES = {
    "ETFR": "next-year expanding-window OLS revenue trend minus current revenue",
    "LTDR": "long-term debt / (long-term debt + equity)",
    "DER": "total debt / equity",
    "RATES": "(x_t - x_{t-1}) / |x_{t-1}|, missing on a zero base",
}

MIN_YEARS = 4


def _ratio(num: np.ndarray, den: np.ndarray) -> np.ndarray:
    out = np.full(num.shape, np.nan)
    ok = (den != 0) & ~np.isnan(den) & ~np.isnan(num)
    with np.errstate(over="ignore"):
        out[ok] = num[ok] / den[ok]
    out[np.isinf(out)] = np.nan  # near-zero base
    return out


def rate_of_change(series: Sequence[float]) -> np.ndarray:
    """Year-over-year growth against the absolute prior value.

    >>> rate_of_change([100, 120]).tolist()
    [nan, 0.2]
    """
    x = np.asarray(series, dtype=float)
    if x.size < 2:
        raise SeriesTooShort(f"rate of change needs 2 points, got {x.size}")
    out = np.full(x.size, np.nan)
    out[1:] = _ratio(x[1:] - x[:-1], np.abs(x[:-1]))
    return out


def forecast_next_revenue(revenues: Sequence[float]) -> float:
    """Linear trend of revenue on its time index, evaluated one step ahead."""
    r = np.asarray(revenues, dtype=float)
    m = r.size
    if m < 3:
        raise SeriesTooShort(f"trend forecast needs 3 points, got {m}")
    design = np.column_stack([np.ones(m), np.arange(m, dtype=float)])
    (intercept, slope), *_ = np.linalg.lstsq(design, r, rcond=None)
    return float(intercept + slope * m)


def expected_revenue_increment(revenues: Sequence[float]) -> np.ndarray:
    """ETFR_t = forecast(t + 1 | revenue up to t) - revenue_t; missing before year 3."""
    r = np.asarray(revenues, dtype=float)
    out = np.full(r.size, np.nan)
    for t in range(2, r.size):
        out[t] = forecast_next_revenue(r[: t + 1]) - r[t]
    return out


@dataclass(frozen=True)
class DerivedSeries:
    firm_id: str
    years: tuple[int, ...]
    MVF: np.ndarray
    EBIT: np.ndarray
    ETFR: np.ndarray
    DER: np.ndarray
    LTDE: np.ndarray
    LTDA: np.ndarray
    LTDR: np.ndarray
    ROA: np.ndarray
    ROE: np.ndarray
    RTD: np.ndarray
    REX: np.ndarray
    RRE: np.ndarray
    REQ: np.ndarray
    REPS: np.ndarray

    def __len__(self) -> int:
        return len(self.years)

    def column(self, name: str) -> np.ndarray:
        if name not in VARIABLES:
            raise KeyError(name)
        return getattr(self, name)

    def as_dict(self) -> dict[str, np.ndarray]:
        return {name: getattr(self, name) for name in VARIABLES}


def compute_derived_series(panel: FirmPanel) -> DerivedSeries:
    if len(panel) < MIN_YEARS:
        raise PanelTooShort(f"{panel.firm_id}: {len(panel)} years, need {MIN_YEARS}")

    def col(name: str) -> np.ndarray:
        return np.array(panel.column(name), dtype=float)

    ltd = col("long_term_debt")
    debt = col("total_debt")
    equity = col("equity")
    assets = col("total_assets")
    income = col("net_income")

    return DerivedSeries(
        firm_id=panel.firm_id,
        years=tuple(panel.years),
        MVF=col("market_value"),
        EBIT=col("ebit"),
        ETFR=expected_revenue_increment(col("revenue")),
        DER=_ratio(debt, equity),
        LTDE=_ratio(ltd, equity),
        LTDA=_ratio(ltd, assets),
        LTDR=_ratio(ltd, ltd + equity),
        ROA=_ratio(income, assets),
        ROE=_ratio(income, equity),
        RTD=rate_of_change(ltd),
        REX=rate_of_change(col("total_expenses")),
        RRE=rate_of_change(col("retained_earnings")),
        REQ=rate_of_change(equity),
        REPS=rate_of_change(col("eps")),
    )
