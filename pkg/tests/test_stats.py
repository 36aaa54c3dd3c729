import math
from fractions import Fraction

import numpy as np
import pytest
from hypothesis import assume, given, settings
from hypothesis import strategies as st
from scipy import special, stats as sps

from capstruct.derive import VARIABLES, compute_derived_series
from capstruct.errors import (
    EmptySeries,
    GroupTooSmall,
    InvalidDf,
    RankDeficient,
    TooFewObservations,
    TooFewPairs,
    ZeroVariance,
)
from capstruct.stats import (
    betainc_regularized,
    describe,
    f_tail_probability,
    midranks,
    ols_fit,
    spearman,
    spearman_matrix,
    t_tail_probability,
    welch_ttest,
)

import oracles


# --- describe --------------------------------------------------------------

def test_describe_examples():
    d = describe([1, 2, 3])
    assert (d.mean, d.minimum, d.maximum, d.n) == (2, 1, 3, 3)
    assert d.standard_error == pytest.approx(1 / math.sqrt(3), rel=1e-15)
    one = describe([5, math.nan])
    assert one.mean == 5 and math.isnan(one.standard_error) and one.n == 1
    with pytest.raises(EmptySeries):
        describe([math.nan])


def test_describe_demo_roa_exact(demo):
    roa = compute_derived_series(demo).ROA
    exact = [Fraction(r.net_income) / Fraction(r.total_assets) for r in demo.records]
    mean = sum(exact) / len(exact)
    var = sum((v - mean) ** 2 for v in exact) / (len(exact) - 1)
    d = describe(roa)
    assert d.mean == pytest.approx(float(mean), rel=1e-12)
    assert d.standard_error == pytest.approx(math.sqrt(var / len(exact)), rel=1e-12)
    assert d.minimum == float(min(exact)) and d.maximum == float(max(exact))


@settings(max_examples=100, deadline=None)
@given(st.lists(st.floats(-1e9, 1e9, allow_nan=False), min_size=1, max_size=30))
def test_describe_invariants(xs):
    d = describe(xs)
    assert d.minimum <= d.mean <= d.maximum
    assert d.n == 1 or d.standard_error >= 0


# --- OLS -------------------------------------------------------------------

def test_exact_fit():
    r = ols_fit([2, 4, 6, 8], [1, 2, 3, 4])
    assert r.coefficients[0] == pytest.approx(0, abs=1e-12)
    assert r.coefficients[1] == pytest.approx(2, rel=1e-12)
    assert r.r_squared == 1.0


def test_three_points_is_too_few_for_one_regressor():
    with pytest.raises(TooFewObservations):
        ols_fit([2, 4, 6], [1, 2, 3])


def test_constant_response():
    r = ols_fit([5.0] * 6, [1, 2, 3, 4, 5, 7])
    assert r.coefficients[1] == 0 and r.r_squared == 0
    assert r.p_values[1] == 1.0 and r.f_p_value == 1.0


def test_listwise_deletion():
    y = [1, 2, math.nan, 4, 5, 6.5, 7]
    x = [1, 2, 3, math.nan, 5, 6, 7]
    r = ols_fit(y, x)
    assert r.n_used == 5
    assert r.used_rows.tolist() == [True, True, False, False, True, True, True]


def test_collinear_design():
    x = np.arange(8.0)
    with pytest.raises(RankDeficient):
        ols_fit(x ** 2, np.column_stack([x, 3 * x]))
    with pytest.raises(RankDeficient):
        ols_fit(x, np.zeros(8))


def test_mixed_scale_columns_not_flagged():
    rng = np.random.default_rng(3)
    X = np.column_stack([rng.normal(size=12) * 1e9, rng.normal(size=12) * 1e-3])
    y = rng.normal(size=12)
    r = ols_fit(y, X)
    o = oracles.ols_normal_equations(y, X)
    np.testing.assert_allclose(r.coefficients, o["beta"], rtol=1e-8)


@pytest.mark.parametrize("seed", range(20))
def test_ols_matches_normal_equations(seed):
    rng = np.random.default_rng(seed)
    y, X = oracles.random_regression(rng)
    o = oracles.ols_normal_equations(y, X)
    r = ols_fit(y, X)
    rb = ols_fit(y, X, robust=True)
    np.testing.assert_allclose(r.coefficients, o["beta"], rtol=1e-9)
    np.testing.assert_allclose(r.classical_se, o["se"], rtol=1e-9)
    np.testing.assert_allclose(r.robust_se, o["hc1"], rtol=1e-9)
    np.testing.assert_allclose(r.t_stats, o["t"], rtol=1e-9)
    np.testing.assert_allclose(r.p_values, o["p"], rtol=1e-9)
    np.testing.assert_allclose(rb.t_stats, o["t_robust"], rtol=1e-9)
    np.testing.assert_allclose(rb.p_values, o["p_robust"], rtol=1e-9)
    assert r.r_squared == pytest.approx(o["r2"], rel=1e-9)
    assert r.f_stat == pytest.approx(o["f"], rel=1e-9)
    assert r.f_p_value == pytest.approx(o["f_p"], rel=1e-9)
    assert rb.se_type == "HC1" and r.se_type == "classical"


def test_hc1_equals_classical_for_balanced_equal_residuals():
    # x = +-1 balanced, residuals +-1 orthogonal to x and the constant
    x = np.array([1, 1, -1, -1, 1, 1, -1, -1], dtype=float)
    e = np.array([1, -1, 1, -1, -1, 1, -1, 1], dtype=float)
    y = 2.0 + 3.0 * x + e
    r = ols_fit(y, x)
    np.testing.assert_allclose(r.residuals, e, atol=1e-12)
    np.testing.assert_allclose(r.robust_se, r.classical_se, rtol=1e-9)


finite = st.floats(-1e3, 1e3, allow_nan=False)


@st.composite
def regressions(draw):
    n = draw(st.integers(6, 15))
    k = draw(st.integers(1, 3))
    X = np.array([[draw(finite) for _ in range(k)] for _ in range(n)])
    y = np.array([draw(finite) for _ in range(n)])
    return y, X


def _fit_or_skip(y, X):
    try:
        r = ols_fit(y, X)
    except RankDeficient:
        assume(False)
    # poorly conditioned draws say nothing about the invariants
    Z = np.column_stack([np.ones(len(y)), X])
    assume(np.linalg.cond(Z / np.linalg.norm(Z, axis=0)) < 1e6)
    assume(np.ptp(y) > 1e-6 * max(1.0, np.abs(y).max()))
    assume(r.r_squared < 1 - 1e-9)
    return r


@settings(max_examples=80, deadline=None)
@given(regressions())
def test_residuals_sum_to_zero(data):
    y, X = data
    r = _fit_or_skip(y, X)
    assert abs(r.residuals.sum()) <= 1e-9 * max(np.linalg.norm(y), 1.0)
    assert 0.0 <= r.r_squared <= 1.0


@settings(max_examples=80, deadline=None)
@given(regressions(), st.sampled_from([-1e4, -2.5, 1e-3, 7.0, 1e6]))
def test_regressor_scaling(data, c):
    y, X = data
    r = _fit_or_skip(y, X)
    X2 = X.copy()
    X2[:, 0] *= c
    s = ols_fit(y, X2)
    assert s.coefficients[1] == pytest.approx(r.coefficients[1] / c, rel=1e-8, abs=1e-12)
    # a negative factor flips the sign of t only
    np.testing.assert_allclose(np.abs(s.t_stats[1:]), np.abs(r.t_stats[1:]), rtol=1e-8, atol=1e-9)
    np.testing.assert_allclose(s.p_values[1:], r.p_values[1:], rtol=1e-8, atol=1e-12)
    assert s.r_squared == pytest.approx(r.r_squared, rel=1e-8, abs=1e-12)
    assert s.f_stat == pytest.approx(r.f_stat, rel=1e-8, abs=1e-9)


@settings(max_examples=80, deadline=None)
@given(regressions(), st.floats(-1e3, 1e3, allow_nan=False))
def test_shift_changes_only_intercept(data, shift):
    y, X = data
    r = _fit_or_skip(y, X)
    s = ols_fit(y + shift, X)
    scale = max(1.0, np.abs(y).max(), abs(shift))
    assert s.coefficients[0] == pytest.approx(r.coefficients[0] + shift, abs=1e-8 * scale)
    np.testing.assert_allclose(s.coefficients[1:], r.coefficients[1:], rtol=1e-7, atol=1e-9 * scale)


# --- t and F tails ---------------------------------------------------------

def test_t_tail_examples():
    for df in (0.5, 1, 3, 10, 1e3, 1e9):
        assert t_tail_probability(0.0, df) == 1.0
    assert t_tail_probability(2.228, 10) == pytest.approx(
        oracles.t_two_tail_by_quadrature(2.228, 10), abs=1e-9)
    assert abs(t_tail_probability(2.228, 10) - 0.050) <= 0.001
    normal = math.erfc(1.96 / math.sqrt(2))
    assert abs(t_tail_probability(1.96, 1e6) - normal) <= 1e-5
    assert abs(t_tail_probability(1.96, 1e6) - 0.050) <= 0.003
    with pytest.raises(InvalidDf):
        t_tail_probability(1.0, 0)


@pytest.mark.parametrize("df", [1, 2, 5, 10, 30, 200])
@pytest.mark.parametrize("t", [0.1, 0.7, 1.5, 2.5, 4.0, 9.0])
def test_t_tail_against_quadrature(t, df):
    assert t_tail_probability(t, df) == pytest.approx(oracles.t_two_tail_by_quadrature(t, df), abs=1e-10)
    assert t_tail_probability(-t, df) == t_tail_probability(t, df)


def test_t_tail_huge_df_matches_scipy():
    for df in (1e4, 1e6, 5e7, 2e8):
        for t in (0.5, 1.96, 3.0):
            assert t_tail_probability(t, df) == pytest.approx(2 * sps.t.sf(t, df), rel=1e-8)


def test_t_tail_monotone():
    grid = np.linspace(0, 40, 1000)
    for df in (1, 4, 10, 100):
        p = [t_tail_probability(float(t), df) for t in grid]
        assert all(b < a for a, b in zip(p, p[1:]) if a > 1e-300)
        assert all(0 <= v <= 1 for v in p)


@pytest.mark.parametrize("d1,d2", [(1, 10), (2, 9), (4, 7), (3, 100), (1, 1)])
@pytest.mark.parametrize("f", [0.01, 0.5, 1.0, 3.3, 20.0])
def test_f_tail_against_scipy(f, d1, d2):
    assert f_tail_probability(f, d1, d2) == pytest.approx(sps.f.sf(f, d1, d2), rel=1e-10)


def test_f_tail_table_values():
    # one-regressor model on 12 years: p from R² alone
    for r2, want in ((0.494918, 0.010685), (0.280466884, 0.076594)):
        f = r2 / ((1 - r2) / 10)
        assert f_tail_probability(f, 1, 10) == pytest.approx(want, abs=5e-7)


@settings(max_examples=200, deadline=None)
@given(st.floats(0.05, 500), st.floats(0.05, 500), st.floats(0, 1))
def test_incomplete_beta_against_scipy(a, b, x):
    assert betainc_regularized(a, b, x) == pytest.approx(special.betainc(a, b, x), rel=1e-9, abs=1e-14)


# --- Welch -----------------------------------------------------------------

def test_welch_examples():
    same = welch_ttest([1, 2, 3], [1, 2, 3])
    assert same.t == 0 and same.p_value == 1.0
    res = welch_ttest([1, 2, 3], [1, 2, 3, 4, 5])
    t, df, p = oracles.welch_by_hand([1, 2, 3], [1, 2, 3, 4, 5])
    assert res.t == pytest.approx(t, rel=1e-9)
    assert res.df == pytest.approx(df, rel=1e-9)
    assert res.p_value == pytest.approx(p, rel=1e-9)
    ref = sps.ttest_ind([1, 2, 3], [1, 2, 3, 4, 5], equal_var=False)
    assert res.p_value == pytest.approx(ref.pvalue, rel=1e-9)
    with pytest.raises(GroupTooSmall):
        welch_ttest([1], [1, 2, 3])
    with pytest.raises(ZeroVariance):
        welch_ttest([2, 2], [2, 2, 2])


# --- Spearman --------------------------------------------------------------

def test_spearman_examples():
    assert spearman([1, 2, 3], [10, 20, 30]).rho == 1.0
    assert spearman([1, 2, 3], [3, 2, 1]).rho == -1.0
    tied = spearman([1, 2, 2, 4], [3, 1, 4, 4])
    assert tied.rho == pytest.approx(oracles.spearman_oracle([1, 2, 2, 4], [3, 1, 4, 4]), abs=1e-15)
    assert tied.n == 4
    with pytest.raises(TooFewPairs):
        spearman([1, 2], [2, 1])
    with pytest.raises(ZeroVariance):
        spearman([1, 1, 1], [1, 2, 3])


def test_spearman_p_matches_scipy():
    x = [3.1, 1.2, 5.5, 2.2, 2.2, 7.0, 4.4, 6.1]
    y = [2.0, 1.0, 4.0, 3.0, 5.0, 6.0, 8.0, 7.0]
    ref = sps.spearmanr(x, y)
    r = spearman(x, y)
    assert r.rho == pytest.approx(ref.statistic, rel=1e-12)
    assert r.p_value == pytest.approx(ref.pvalue, rel=1e-9)


@settings(max_examples=100, deadline=None)
@given(st.lists(st.integers(-5, 5), min_size=1, max_size=25))
def test_midranks_bruteforce(xs):
    assert midranks(xs).tolist() == oracles.midranks_bruteforce(xs)


pairs = st.integers(3, 20).flatmap(
    lambda n: st.tuples(st.lists(st.integers(0, 6), min_size=n, max_size=n),
                        st.lists(st.integers(0, 6), min_size=n, max_size=n)))


@settings(max_examples=100, deadline=None)
@given(pairs)
def test_spearman_monotone_invariance(p):
    x, y = p
    assume(len(set(x)) > 1 and len(set(y)) > 1)
    base = spearman(x, y)
    moved = spearman([math.exp(v) - 3 for v in x], [v ** 3 + 2 * v for v in y])
    assert moved.rho == base.rho
    assert -1 <= base.rho <= 1


def test_matrix_consistency(demo):
    cols = compute_derived_series(demo).as_dict()
    cm = spearman_matrix(cols)
    assert cm.names == list(VARIABLES)
    for i, a in enumerate(cm.names):
        assert cm.cells[i][i].rho == 1.0
        for j, b in enumerate(cm.names):
            if i != j:
                assert cm.get(a, b) == spearman(cols[a], cols[b])
    rho = cm.rho()
    assert np.array_equal(rho, rho.T)


def test_matrix_examples():
    x = [1.0, 4.0, 2.0, 8.0, 5.0]
    cm = spearman_matrix({"a": x, "b": list(x), "c": [-v for v in x], "k": [1.0] * 5})
    assert cm.get("a", "b").rho == 1.0
    assert cm.get("a", "c").rho == -1.0
    assert cm.get("a", "k") is None
