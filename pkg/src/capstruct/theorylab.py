"""Hypothesis battery, pecking-order and peak-MVF procedures, theory verdicts."""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from enum import Enum
from typing import Iterable

import numpy as np

from .config import DEFAULT, Config
from .derive import DerivedSeries
from .errors import (
    AllMissingMVF,
    MissingEvidence,
    NoUsableYears,
    RankDeficient,
    TooFewObservations,
    TooFewPairs,
    ZeroVariance,
)
from .stats import RegressionResult, ols_fit, spearman

STAR_LEVELS = ((0.01, "***"), (0.05, "**"), (0.10, "*"))
STAR_NOTE = "*** p<0.01, ** p<0.05, * p<0.1"


class Theory(str, Enum):
    NET_INCOME = "NetIncome"
    NET_OPERATING_INCOME = "NetOperatingIncome"
    MM = "MM"
    TRADE_OFF = "TradeOff"
    PECKING_ORDER = "PeckingOrder"
    AGENCY = "Agency"

    @property
    def label(self) -> str:
        return _THEORY_LABELS[self]


_THEORY_LABELS = {
    Theory.NET_INCOME: "net income theory",
    Theory.NET_OPERATING_INCOME: "net operating income theory",
    Theory.MM: "MM theory",
    Theory.TRADE_OFF: "trade-off (traditional) theory",
    Theory.PECKING_ORDER: "pecking order theory",
    Theory.AGENCY: "agency cost theory",
}


class Status(str, Enum):
    FOLLOWED = "Followed"
    PARTIAL = "PartiallyFollowed"
    NOT_FOLLOWED = "NotFollowed"


@dataclass(frozen=True)
class HypothesisDef:
    id: str
    dependent: str
    regressors: tuple[str, ...]
    method: str  # "ols" | "spearman"
    title: str


HYPOTHESES = (
    HypothesisDef("H11", "MVF", ("RTD",), "ols", "RTD -> MVF"),
    HypothesisDef("H12", "MVF", ("EBIT",), "ols", "EBIT -> MVF"),
    HypothesisDef("H13", "MVF", ("DER",), "ols", "DER -> MVF"),
    HypothesisDef("H14", "MVF", ("ETFR",), "ols", "ETFR -> MVF"),
    HypothesisDef("H15", "REX", ("RTD",), "ols", "RTD -> REX"),
    HypothesisDef("H16", "ROA", ("LTDA",), "spearman", "LTDA ~ ROA"),
    HypothesisDef("H17", "ROE", ("LTDA",), "spearman", "LTDA ~ ROE"),
    HypothesisDef("H18", "ROA", ("LTDA", "LTDE"), "ols", "LTDA + LTDE -> ROA"),
)
POOLED_REGRESSORS = ("RTD", "EBIT", "DER", "ETFR")


def stars(p: float) -> str:
    """Significance stars; thresholds are strict (p < 0.01 gets three)."""
    if p is None or math.isnan(p):
        return ""
    for level, mark in STAR_LEVELS:
        if p < level:
            return mark
    return ""


def _sign(x: float) -> int:
    if x is None or math.isnan(x) or x == 0:
        return 0
    return 1 if x > 0 else -1


@dataclass
class HypothesisOutcome:
    id: str
    dependent: str
    regressors: tuple[str, ...]
    method: str
    r_squared: float
    p_value: float
    estimate: float  # slope (first regressor) or Spearman rho
    coefficient_sign: int
    stars: str
    n_used: int
    years_used: tuple[int, ...] = ()
    robust_se: float = math.nan  # of the first slope; NaN for rank tests
    pooled_p_value: float | None = None  # same regressor inside the pooled MVF model
    regression: RegressionResult | None = field(default=None, repr=False)
    error: str | None = None

    @property
    def ok(self) -> bool:
        return self.error is None


def _failed(h: HypothesisDef, reason: str, n_used: int) -> HypothesisOutcome:
    return HypothesisOutcome(
        h.id, h.dependent, h.regressors, h.method,
        r_squared=math.nan, p_value=math.nan, estimate=math.nan,
        coefficient_sign=0, stars="", n_used=n_used, error=reason,
    )


def _complete_rows(derived: DerivedSeries, names: Iterable[str]) -> np.ndarray:
    mask = np.ones(len(derived), dtype=bool)
    for name in names:
        mask &= ~np.isnan(derived.column(name))
    return mask


def _run(h: HypothesisDef, derived: DerivedSeries, config: Config) -> HypothesisOutcome:
    mask = _complete_rows(derived, (h.dependent,) + h.regressors)
    n = int(mask.sum())
    if n < config.min_rows:
        return _failed(h, f"TooFewObservations: {n} usable rows, need {config.min_rows}", n)
    years = tuple(y for y, m in zip(derived.years, mask) if m)
    y = derived.column(h.dependent)

    if h.method == "spearman":
        try:
            res = spearman(derived.column(h.regressors[0]), y)
        except (TooFewPairs, ZeroVariance) as exc:
            return _failed(h, f"{type(exc).__name__}: {exc}", n)
        return HypothesisOutcome(
            h.id, h.dependent, h.regressors, h.method,
            r_squared=res.rho ** 2, p_value=res.p_value, estimate=res.rho,
            coefficient_sign=_sign(res.rho), stars=stars(res.p_value),
            n_used=res.n, years_used=years,
        )

    X = np.column_stack([derived.column(r) for r in h.regressors])
    try:
        fit = ols_fit(y, X, robust=config.robust_pvalues, names=h.regressors)
    except (TooFewObservations, RankDeficient) as exc:
        return _failed(h, f"{type(exc).__name__}: {exc}", n)
    # one regressor: slope t-test; several: joint F-test
    p = float(fit.p_values[1]) if fit.k == 1 else fit.f_p_value
    return HypothesisOutcome(
        h.id, h.dependent, h.regressors, h.method,
        r_squared=fit.r_squared, p_value=p, estimate=float(fit.coefficients[1]),
        coefficient_sign=_sign(float(fit.coefficients[1])), stars=stars(p),
        n_used=fit.n_used, years_used=years, robust_se=float(fit.robust_se[1]),
        regression=fit,
    )


def pooled_fit(derived: DerivedSeries, config: Config = DEFAULT) -> RegressionResult | None:
    """Four-regressor MVF model on RTD, EBIT, DER and ETFR; None when not estimable."""
    y = derived.MVF
    X = np.column_stack([derived.column(r) for r in POOLED_REGRESSORS])
    try:
        return ols_fit(y, X, robust=config.robust_pvalues, names=POOLED_REGRESSORS)
    except (TooFewObservations, RankDeficient):
        return None


def test_hypotheses(derived: DerivedSeries, config: Config = DEFAULT) -> list[HypothesisOutcome]:
    """Run H11-H18. A hypothesis that cannot be estimated carries ``error``."""
    outcomes = [_run(h, derived, config) for h in HYPOTHESES]
    pooled = pooled_fit(derived, config)
    if pooled is not None:
        for o in outcomes[:4]:
            o.pooled_p_value = pooled.p_value(o.regressors[0])
    return outcomes


# pytest would otherwise try to collect the function above
test_hypotheses.__test__ = False


@dataclass(frozen=True)
class PeckingOrderResult:
    years_followed: int
    per_year: dict[int, bool]
    n_usable: int


def pecking_order_count(derived: DerivedSeries, strict: bool = True) -> PeckingOrderResult:
    """Count years whose financing growth ranks RRE > RTD > REQ."""
    per_year: dict[int, bool] = {}
    for year, rre, rtd, req in zip(derived.years, derived.RRE, derived.RTD, derived.REQ):
        if np.isnan(rre) or np.isnan(rtd) or np.isnan(req):
            continue
        if strict:
            per_year[year] = bool(rre > rtd > req)
        else:
            per_year[year] = bool(rre >= rtd >= req)
    if len(per_year) < 2:
        raise NoUsableYears(f"{derived.firm_id}: {len(per_year)} years with RRE, RTD and REQ")
    return PeckingOrderResult(sum(per_year.values()), per_year, len(per_year))


@dataclass(frozen=True)
class PeakResult:
    peak_year: int
    peak_mvf: float
    contemporaneous_der: float
    lag_der: float | None  # None when the peak is the first observation
    peak_index: int
    n_years: int

    @property
    def interior(self) -> bool:
        return 0 < self.peak_index < self.n_years - 1


def peak_mvf_analysis(derived: DerivedSeries) -> PeakResult:
    mvf = derived.MVF
    if len(mvf) < 2:
        raise AllMissingMVF(f"{derived.firm_id}: need two years of MVF")
    if np.all(np.isnan(mvf)):
        raise AllMissingMVF(f"{derived.firm_id}: MVF missing in every year")
    i = int(np.nanargmax(mvf))  # first occurrence on ties
    lag = None if i == 0 else float(derived.DER[i - 1])
    return PeakResult(
        peak_year=derived.years[i],
        peak_mvf=float(mvf[i]),
        contemporaneous_der=float(derived.DER[i]),
        lag_der=lag,
        peak_index=i,
        n_years=len(mvf),
    )


@dataclass(frozen=True)
class TheoryVerdict:
    theory: Theory
    status: Status
    evidence: tuple[str, ...]


def _grade(p: float, config: Config) -> int:
    """2 at the Followed level, 1 at the partial level, 0 otherwise."""
    if p is None or math.isnan(p):
        return 0
    if p < config.followed_alpha:
        return 2
    if p < config.partial_alpha:
        return 1
    return 0


def _describe(o: HypothesisOutcome) -> str:
    if not o.ok:
        return f"{o.id} not estimable ({o.error})"
    what = "rho" if o.method == "spearman" else "slope"
    return f"{o.id} {' + '.join(o.regressors)} -> {o.dependent}: p={o.p_value:.6f}{o.stars}, {what} {o.estimate:+.6g}"


def classify_firm(
    outcomes: Iterable[HypothesisOutcome],
    po: PeckingOrderResult | None,
    peak: PeakResult | None,
    config: Config = DEFAULT,
) -> list[TheoryVerdict]:
    """Grade the six theories from the hypothesis, pecking-order and peak evidence.

    Significance ladder: p below ``followed_alpha`` supports Followed,
    below ``partial_alpha`` PartiallyFollowed. Hypotheses that could not be
    estimated count as not significant.
    """
    by_id = {o.id: o for o in outcomes}
    for hid in ("H11", "H12", "H13", "H14", "H15", "H16", "H17"):
        if hid not in by_id:
            raise MissingEvidence(f"outcome {hid} is absent")
    if po is None:
        raise MissingEvidence("pecking-order result is absent")
    if peak is None:
        raise MissingEvidence("peak-MVF result is absent")

    g = {hid: _grade(o.p_value, config) for hid, o in by_id.items()}
    ev = {hid: _describe(o) for hid, o in by_id.items()}
    a5, a10 = config.followed_alpha, config.partial_alpha
    verdicts = []

    # net income: leverage moves value
    lev = max(g["H11"], g["H13"])
    status = (Status.NOT_FOLLOWED, Status.PARTIAL, Status.FOLLOWED)[lev]
    verdicts.append(TheoryVerdict(Theory.NET_INCOME, status, (
        ev["H11"], ev["H13"],
        f"rule: H11 or H13 significant at {a5:g} -> Followed, at {a10:g} -> Partial",
    )))

    # net operating income: EBIT moves value, DER does not
    if g["H13"] == 0 and g["H12"] == 2:
        status = Status.FOLLOWED
    elif g["H13"] == 0 and g["H12"] == 1:
        status = Status.PARTIAL
    else:
        status = Status.NOT_FOLLOWED
    verdicts.append(TheoryVerdict(Theory.NET_OPERATING_INCOME, status, (
        ev["H12"], ev["H13"],
        f"rule: H12 significant at {a5:g} and H13 not significant at {a10:g}",
    )))

    # MM: leverage irrelevant, value tracks expected future revenue
    lev_silent = g["H11"] == 0 and g["H13"] == 0
    if lev_silent and g["H14"] == 2:
        status = Status.FOLLOWED
    elif lev_silent and g["H14"] == 1:
        status = Status.PARTIAL
    else:
        status = Status.NOT_FOLLOWED
    verdicts.append(TheoryVerdict(Theory.MM, status, (
        ev["H11"], ev["H13"], ev["H14"],
        f"rule (reconstructed): H11 and H13 not significant at {a10:g}, H14 significant at {a5:g}",
    )))

    # trade-off: debt growth offsets cost growth, value peaks at interior DER
    h15 = by_id["H15"]
    offset = g["H15"] == 2 and h15.coefficient_sign < 0
    held = int(offset) + int(peak.interior)
    status = (Status.NOT_FOLLOWED, Status.PARTIAL, Status.FOLLOWED)[held]
    where = "interior" if peak.interior else "boundary"
    verdicts.append(TheoryVerdict(Theory.TRADE_OFF, status, (
        ev["H15"],
        f"peak MVF in {peak.peak_year} ({where} of {peak.n_years} years), DER {peak.contemporaneous_der:.6g}",
        "rule: negative significant H15 and interior MVF peak",
    )))

    # pecking order: majority of usable years rank RRE > RTD > REQ
    if po.years_followed > po.n_usable / 2:
        status = Status.FOLLOWED
    elif po.years_followed >= 1:
        status = Status.PARTIAL
    else:
        status = Status.NOT_FOLLOWED
    verdicts.append(TheoryVerdict(Theory.PECKING_ORDER, status, (
        f"pecking order held in {po.years_followed} of {po.n_usable} usable years",
        "rule: more than half -> Followed, at least one -> Partial",
    )))

    # agency: leverage and profitability move together
    status = Status.NOT_FOLLOWED
    for hid in ("H16", "H17"):
        o = by_id[hid]
        if g[hid] == 2 and o.coefficient_sign > 0:
            status = Status.FOLLOWED
            break
        if g[hid] >= 1:
            status = Status.PARTIAL
    verdicts.append(TheoryVerdict(Theory.AGENCY, status, (
        ev["H16"], ev["H17"],
        f"rule: H16 or H17 positive and significant at {a5:g}; partial at {a10:g} or with negative rho",
    )))
    return verdicts
