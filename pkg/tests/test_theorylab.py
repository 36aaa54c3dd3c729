import dataclasses
import math
import random

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from capstruct import fixture_path, load_panel
from capstruct.config import Config
from capstruct.derive import VARIABLES, DerivedSeries, compute_derived_series
from capstruct.errors import AllMissingMVF, MissingEvidence, NoUsableYears
from capstruct.synth import GeneratorSpec, generate_panel
from capstruct.theorylab import (
    HYPOTHESES,
    HypothesisOutcome,
    PeakResult,
    PeckingOrderResult,
    Status,
    Theory,
    classify_firm,
    peak_mvf_analysis,
    pecking_order_count,
    stars,
    test_hypotheses as run_hypotheses,
)

from conftest import make_panel


def derived(n=None, **cols):
    """DerivedSeries with the given columns; everything else missing."""
    n = n or len(next(iter(cols.values())))
    arrays = {v: np.full(n, np.nan) for v in VARIABLES}
    for k, v in cols.items():
        arrays[k] = np.asarray(v, dtype=float)
    return DerivedSeries("T", tuple(range(2011, 2011 + n)), **arrays)


def outcome(hid, p, sign=1, method=None):
    h = next(h for h in HYPOTHESES if h.id == hid)
    return HypothesisOutcome(hid, h.dependent, h.regressors, method or h.method,
                             r_squared=0.3, p_value=p, estimate=float(sign), coefficient_sign=sign,
                             stars=stars(p), n_used=12)


def evidence(**ps):
    """Outcomes for H11-H18, p = 0.9 unless given as H11=(p, sign) or H11=p."""
    out = []
    for h in HYPOTHESES:
        v = ps.get(h.id, 0.9)
        p, sign = v if isinstance(v, tuple) else (v, 1)
        out.append(outcome(h.id, p, sign))
    return out


PO_NONE = PeckingOrderResult(0, {y: False for y in range(2012, 2023)}, 11)
PEAK_LAST = PeakResult(2022, 10.0, 1.0, 0.9, 11, 12)
PEAK_MID = PeakResult(2016, 10.0, 1.0, 0.9, 5, 12)


def verdict(outcomes, theory, po=PO_NONE, peak=PEAK_LAST, config=Config()):
    return {v.theory: v.status for v in classify_firm(outcomes, po, peak, config)}[theory]


# --- stars -----------------------------------------------------------------

@pytest.mark.parametrize("p,want", [
    (0.0099, "***"), (0.009999, "***"), (0.01, "**"), (0.010001, "**"), (0.0101, "**"),
    (0.0499, "**"), (0.05, "*"), (0.0501, "*"), (0.0999, "*"), (0.1, ""), (0.1001, ""),
    (0.076594, "*"), (0.004, "***"), (1.0, ""), (math.nan, ""),
])
def test_stars(p, want):
    assert stars(p) == want


# --- hypotheses ------------------------------------------------------------

def test_planted_rtd_effect_is_three_stars():
    rng = np.random.default_rng(11)
    rtd = np.r_[np.nan, rng.uniform(-0.1, 0.3, 11)]
    ltd = 100.0 * np.cumprod(np.r_[1.0, 1 + rtd[1:]])
    mvf = 5 * np.nan_to_num(rtd) + 1e-4 * rng.normal(size=12) + 10
    out = {o.id: o for o in run_hypotheses(compute_derived_series(
        make_panel(12, long_term_debt=ltd, market_value=mvf)))}
    assert out["H11"].stars == "***"
    assert out["H11"].estimate == pytest.approx(5, rel=1e-3)
    assert out["H11"].n_used == 11 and out["H11"].years_used[0] == 2012


def test_demo_outcomes_shape(demo):
    outs = run_hypotheses(compute_derived_series(demo))
    assert [o.id for o in outs] == [h.id for h in HYPOTHESES]
    by = {o.id: o for o in outs}
    assert by["H14"].n_used == 10  # ETFR starts in the third year
    assert by["H16"].r_squared == pytest.approx(by["H16"].estimate ** 2)
    assert by["H18"].p_value == by["H18"].regression.f_p_value
    for hid in ("H11", "H12", "H13", "H14"):
        assert by[hid].pooled_p_value is not None
    for o in outs:
        assert o.ok and 0 <= o.p_value <= 1 and 0 <= o.r_squared <= 1


def test_robust_config_changes_only_pvalues(demo):
    d = compute_derived_series(demo)
    cl = {o.id: o for o in run_hypotheses(d)}
    rb = {o.id: o for o in run_hypotheses(d, Config(robust_pvalues=True))}
    assert rb["H11"].r_squared == cl["H11"].r_squared
    assert rb["H11"].robust_se == cl["H11"].robust_se
    assert rb["H11"].regression.se_type == "HC1"


def test_short_hypothesis_errors_do_not_stop_others():
    panel = make_panel(6, market_value=[5, 7, 6, 9, 8, 11], ebit=[1, 2, 2, 3, 3, 4])
    out = {o.id: o for o in run_hypotheses(compute_derived_series(panel))}
    assert out["H11"].error and "TooFewObservations" in out["H11"].error
    assert out["H12"].ok


def test_type_one_rate_under_white_noise():
    rejections = {h: 0 for h in ("H11", "H12", "H13", "H14")}
    for seed in range(100):
        outs = run_hypotheses(compute_derived_series(generate_panel(GeneratorSpec(None, seed=seed))))
        for o in outs:
            if o.id in rejections and o.ok and o.p_value < 0.05:
                rejections[o.id] += 1
    for hid, count in rejections.items():
        assert 100 - count >= 90, (hid, count)


# --- pecking order ---------------------------------------------------------

def test_pecking_rule():
    d = derived(RRE=[np.nan, 0.3, 0.1, 0.2], RTD=[np.nan, 0.2, 0.2, 0.2], REQ=[np.nan, 0.1, 0.0, 0.2])
    r = pecking_order_count(d)
    assert r.per_year == {2012: True, 2013: False, 2014: False}
    assert r.years_followed == 1 and r.n_usable == 3
    assert pecking_order_count(d, strict=False).years_followed == 2


def test_pecking_fixture_counts_two():
    d = compute_derived_series(load_panel(fixture_path("pecking_two.csv")))
    r = pecking_order_count(d)
    assert len(d) == 12 and r.years_followed == 2 and r.n_usable == 11


def test_pecking_needs_two_years():
    with pytest.raises(NoUsableYears):
        pecking_order_count(derived(RRE=[np.nan, 0.3, np.nan, np.nan], RTD=[np.nan, 0.2, 0.1, 0.1],
                                    REQ=[np.nan, 0.1, 0.0, 0.0]))


rates = st.lists(st.tuples(*(st.floats(-1, 1, allow_nan=False),) * 3), min_size=3, max_size=14)


@settings(max_examples=100, deadline=None)
@given(rates, st.data())
def test_pecking_count_properties(rows, data):
    rre, rtd, req = (np.r_[np.nan, [r[i] for r in rows]] for i in range(3))
    res = pecking_order_count(derived(RRE=rre, RTD=rtd, REQ=req))
    assert 0 <= res.years_followed <= res.n_usable
    misses = [i + 1 for i, r in enumerate(rows) if not r[0] > r[1] > r[2]]
    if misses and len(rows) > 2:
        drop = data.draw(st.sampled_from(misses))
        keep = [i for i in range(len(rre)) if i != drop]
        fewer = pecking_order_count(derived(RRE=rre[keep], RTD=rtd[keep], REQ=req[keep]))
        assert fewer.years_followed <= res.years_followed


# --- peak ------------------------------------------------------------------

def test_peak_examples():
    p = peak_mvf_analysis(derived(MVF=[1, 3, 2], DER=[0.3, 0.4, 0.5]))
    assert (p.peak_index, p.peak_year, p.contemporaneous_der, p.lag_der) == (1, 2012, 0.4, 0.3)
    first = peak_mvf_analysis(derived(MVF=[5, 3, 2], DER=[0.3, 0.4, 0.5]))
    assert first.lag_der is None and not first.interior
    tie = peak_mvf_analysis(derived(MVF=[4, 4, 4], DER=[0.3, 0.4, 0.5]))
    assert tie.peak_index == 0
    with pytest.raises(AllMissingMVF):
        peak_mvf_analysis(derived(MVF=[np.nan] * 3))


def test_peak_first_fixture():
    d = compute_derived_series(load_panel(fixture_path("peak_first.csv")))
    p = peak_mvf_analysis(d)
    assert p.peak_year == 2011 and p.lag_der is None


# --- classifier ------------------------------------------------------------

def test_noi_followed():
    assert verdict(evidence(H12=0.02, H13=0.60), Theory.NET_OPERATING_INCOME) is Status.FOLLOWED
    assert verdict(evidence(H12=0.07, H13=0.60), Theory.NET_OPERATING_INCOME) is Status.PARTIAL
    assert verdict(evidence(H12=0.02, H13=0.08), Theory.NET_OPERATING_INCOME) is Status.NOT_FOLLOWED


def test_ni_ladder():
    assert verdict(evidence(H13=0.04), Theory.NET_INCOME) is Status.FOLLOWED
    assert verdict(evidence(H11=0.08), Theory.NET_INCOME) is Status.PARTIAL
    assert verdict(evidence(), Theory.NET_INCOME) is Status.NOT_FOLLOWED


def test_mm_rule():
    assert verdict(evidence(H14=0.01), Theory.MM) is Status.FOLLOWED
    assert verdict(evidence(H14=0.06), Theory.MM) is Status.PARTIAL
    assert verdict(evidence(H14=0.01, H11=0.09), Theory.MM) is Status.NOT_FOLLOWED


def test_tradeoff_rule():
    neg = evidence(H15=(0.01, -1))
    assert verdict(neg, Theory.TRADE_OFF, peak=PEAK_MID) is Status.FOLLOWED
    assert verdict(neg, Theory.TRADE_OFF, peak=PEAK_LAST) is Status.PARTIAL
    assert verdict(evidence(H15=(0.01, 1)), Theory.TRADE_OFF, peak=PEAK_MID) is Status.PARTIAL
    assert verdict(evidence(H15=(0.01, 1)), Theory.TRADE_OFF, peak=PEAK_LAST) is Status.NOT_FOLLOWED


def test_pecking_verdicts():
    ev = evidence()
    assert verdict(ev, Theory.PECKING_ORDER, po=PO_NONE) is Status.NOT_FOLLOWED
    two = PeckingOrderResult(2, {}, 11)
    assert verdict(ev, Theory.PECKING_ORDER, po=two) is Status.PARTIAL
    assert verdict(ev, Theory.PECKING_ORDER, po=PeckingOrderResult(6, {}, 11)) is Status.FOLLOWED
    assert verdict(ev, Theory.PECKING_ORDER, po=PeckingOrderResult(5, {}, 10)) is Status.PARTIAL


def test_agency_rule():
    assert verdict(evidence(H17=(0.03, 1)), Theory.AGENCY) is Status.FOLLOWED
    assert verdict(evidence(H16=(0.03, -1)), Theory.AGENCY) is Status.PARTIAL
    assert verdict(evidence(H16=(0.08, 1)), Theory.AGENCY) is Status.PARTIAL
    assert verdict(evidence(), Theory.AGENCY) is Status.NOT_FOLLOWED


def test_errored_outcome_counts_as_insignificant():
    ev = evidence(H12=0.01)
    ev[2] = dataclasses.replace(ev[2], p_value=math.nan, error="RankDeficient: collinear")
    assert verdict(ev, Theory.NET_OPERATING_INCOME) is Status.FOLLOWED


def test_missing_evidence():
    ev = [o for o in evidence() if o.id != "H15"]
    with pytest.raises(MissingEvidence):
        classify_firm(ev, PO_NONE, PEAK_LAST)
    with pytest.raises(MissingEvidence):
        classify_firm(evidence(), None, PEAK_LAST)


def test_config_thresholds():
    strict = Config(followed_alpha=0.01, partial_alpha=0.05)
    assert verdict(evidence(H13=0.03), Theory.NET_INCOME, config=strict) is Status.PARTIAL


def test_verdicts_independent_of_order():
    ev = evidence(H11=0.2, H12=0.03, H14=0.07, H15=(0.02, -1), H16=(0.06, 1))
    base = classify_firm(ev, PO_NONE, PEAK_MID)
    rng = random.Random(5)
    for _ in range(20):
        shuffled = ev[:]
        rng.shuffle(shuffled)
        assert classify_firm(shuffled, PO_NONE, PEAK_MID) == base
    assert [v.theory for v in base] == list(Theory)


def test_net_income_recovery():
    followed = 0
    for seed in range(100):
        panel = generate_panel(GeneratorSpec(Theory.NET_INCOME, seed=seed))
        d = compute_derived_series(panel)
        v = classify_firm(run_hypotheses(d), pecking_order_count(d), peak_mvf_analysis(d))
        followed += v[0].status is Status.FOLLOWED
    assert followed >= 95


@settings(max_examples=15, deadline=None)
@given(st.sampled_from(list(Theory)), st.integers(0, 2 ** 32), st.sampled_from([0.001, 3.7, 1e6]))
def test_currency_invariance(theory, seed, c):
    panel = generate_panel(GeneratorSpec(theory, seed=seed))

    def run(p):
        d = compute_derived_series(p)
        outs = run_hypotheses(d)
        po, peak = pecking_order_count(d), peak_mvf_analysis(d)
        return outs, po, peak, classify_firm(outs, po, peak)

    a, b = run(panel), run(panel.scaled(c))
    for x, y in zip(a[0], b[0]):
        assert y.p_value == pytest.approx(x.p_value, rel=1e-9, abs=1e-12)
        assert y.r_squared == pytest.approx(x.r_squared, rel=1e-9, abs=1e-12)
        assert y.stars == x.stars
    assert b[1].years_followed == a[1].years_followed
    assert b[2].peak_year == a[2].peak_year
    assert b[2].peak_mvf == pytest.approx(c * a[2].peak_mvf, rel=1e-15)
    assert [v.status for v in b[3]] == [v.status for v in a[3]]
