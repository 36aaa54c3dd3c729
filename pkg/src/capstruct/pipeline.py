"""Per-firm analysis: derive, test, classify, screen."""

from __future__ import annotations

import logging
from dataclasses import dataclass, field

import numpy as np

from . import benchmarks as bm
from .config import DEFAULT, Config
from .derive import DESCRIPTIVE_ORDER, DerivedSeries, compute_derived_series
from .errors import (
    CapStructError,
    EmptySeries,
    GroupTooSmall,
    SeriesTooShort,
    WindowTooLarge,
    ZeroVariance,
)
from .ingest import Dataset, FirmPanel, PriceSeries, ValidationReport, validate_panel
from .stats import (
    CorrelationMatrix,
    DescriptiveStats,
    RegressionResult,
    WelchResult,
    describe,
    spearman_matrix,
    welch_ttest,
)
from .theorylab import (
    HypothesisOutcome,
    PeakResult,
    PeckingOrderResult,
    TheoryVerdict,
    classify_firm,
    peak_mvf_analysis,
    pecking_order_count,
    pooled_fit,
    test_hypotheses,
)

log = logging.getLogger(__name__)


class PanelInvalid(CapStructError):
    def __init__(self, firm_id: str, report: ValidationReport):
        msgs = "; ".join(f"{f.code}: {f.message}" for f in report.errors)
        super().__init__(f"{firm_id}: {msgs}")
        self.firm_id = firm_id
        self.report = report


@dataclass
class Technicals:
    moving_averages: dict[int, list | None]  # window -> series, None when too short
    rsi: bm.RSIResult | None


@dataclass
class FirmAnalysis:
    firm_id: str
    validation: ValidationReport
    derived: DerivedSeries
    descriptive: dict[str, DescriptiveStats | None]
    hypotheses: list[HypothesisOutcome]
    pooled: RegressionResult | None
    pecking: PeckingOrderResult
    peak: PeakResult
    verdicts: list[TheoryVerdict]
    correlations: CorrelationMatrix
    screen: list[bm.ScreenResult]
    technicals: Technicals | None = None
    config: Config = field(default=DEFAULT, repr=False)


def _technicals(prices: PriceSeries, config: Config) -> Technicals:
    mas: dict[int, list | None] = {}
    for w in config.ma_windows:
        try:
            mas[w] = bm.moving_average(prices, w)
        except WindowTooLarge:
            mas[w] = None
    try:
        rsi = bm.rsi(prices, config.rsi_period)
    except SeriesTooShort:
        rsi = None
    return Technicals(mas, rsi)


def analyze_panel(
    panel: FirmPanel,
    prices: PriceSeries | None = None,
    config: Config = DEFAULT,
    wacc: float | None = None,
    roi: float | None = None,
) -> FirmAnalysis:
    report = validate_panel(panel)
    if not report.ok:
        raise PanelInvalid(panel.firm_id, report)
    for w in report.warnings:
        log.warning("%s %s: %s", panel.firm_id, w.code, w.message)

    derived = compute_derived_series(panel)
    descriptive = {}
    for name in DESCRIPTIVE_ORDER:
        try:
            descriptive[name] = describe(derived.column(name))
        except EmptySeries:
            descriptive[name] = None
    outcomes = test_hypotheses(derived, config)
    pecking = pecking_order_count(derived, strict=config.pecking_strict)
    peak = peak_mvf_analysis(derived)
    inputs = bm.inputs_from_panel(panel, wacc=wacc, roi=roi)
    return FirmAnalysis(
        firm_id=panel.firm_id,
        validation=report,
        derived=derived,
        descriptive=descriptive,
        hypotheses=outcomes,
        pooled=pooled_fit(derived, config),
        pecking=pecking,
        peak=peak,
        verdicts=classify_firm(outcomes, pecking, peak, config),
        correlations=spearman_matrix(derived.as_dict()),
        screen=bm.screen_ratios(inputs) + bm.screen_quant(inputs),
        technicals=_technicals(prices, config) if prices is not None else None,
        config=config,
    )


def analyze_dataset(
    dataset: Dataset,
    config: Config = DEFAULT,
    wacc: float | None = None,
    roi: float | None = None,
) -> list[FirmAnalysis]:
    """Analyse every panel; results are ordered by firm id."""
    return [
        analyze_panel(dataset.panels[fid], dataset.prices.get(fid), config, wacc, roi)
        for fid in sorted(dataset.panels)
    ]


@dataclass(frozen=True)
class GroupComparison:
    variable: str
    split: str
    threshold: float
    n_high: int
    n_low: int
    mean_high: float
    mean_low: float
    test: WelchResult


def leverage_group_test(analyses: list[FirmAnalysis], variable: str = "ROA") -> GroupComparison | None:
    """Welch test of ``variable`` between firm-years above and at/below the pooled median DER."""
    der = np.concatenate([a.derived.DER for a in analyses]) if analyses else np.array([])
    val = np.concatenate([a.derived.column(variable) for a in analyses]) if analyses else np.array([])
    ok = ~np.isnan(der) & ~np.isnan(val)
    if ok.sum() < 4:
        return None
    der, val = der[ok], val[ok]
    cut = float(np.median(der))
    high, low = val[der > cut], val[der <= cut]
    try:
        res = welch_ttest(high, low)
    except (GroupTooSmall, ZeroVariance):
        return None
    return GroupComparison(
        variable, "DER above pooled median vs at or below", cut,
        int(high.size), int(low.size), float(high.mean()), float(low.mean()), res,
    )
