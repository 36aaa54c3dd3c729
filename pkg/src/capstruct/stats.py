"""Statistics kernel: descriptive stats, OLS, t/F tails, Welch test, Spearman.

Missing values are NaN throughout. Regressions delete listwise, the
correlation matrix deletes pairwise.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Mapping, Sequence

import numpy as np
from scipy import linalg

from .errors import (
    EmptySeries,
    GroupTooSmall,
    InvalidDf,
    RankDeficient,
    TooFewObservations,
    TooFewPairs,
    ZeroVariance,
)

PIVOT_TOL = 1e-10
ROBUST_FLAVOR = "HC1"

_CF_EPS = 1e-16
_CF_TINY = 1e-300
_CF_MAXIT = 20000
# The continued fraction loses accuracy as dof grow; past this cutoff Hill's
# normalizing transform is more accurate (~1e-13 relative for any t).
_LARGE_DF = 1e4


# --- special functions -----------------------------------------------------

def _beta_cf(a: float, b: float, x: float) -> float:
    """Continued fraction for the incomplete beta function (modified Lentz)."""
    qab = a + b
    qap = a + 1.0
    qam = a - 1.0
    c = 1.0
    d = 1.0 - qab * x / qap
    if abs(d) < _CF_TINY:
        d = _CF_TINY
    d = 1.0 / d
    h = d
    for m in range(1, _CF_MAXIT + 1):
        m2 = 2 * m
        aa = m * (b - m) * x / ((qam + m2) * (a + m2))
        d = 1.0 + aa * d
        if abs(d) < _CF_TINY:
            d = _CF_TINY
        c = 1.0 + aa / c
        if abs(c) < _CF_TINY:
            c = _CF_TINY
        d = 1.0 / d
        h *= d * c
        aa = -(a + m) * (qab + m) * x / ((a + m2) * (qap + m2))
        d = 1.0 + aa * d
        if abs(d) < _CF_TINY:
            d = _CF_TINY
        c = 1.0 + aa / c
        if abs(c) < _CF_TINY:
            c = _CF_TINY
        d = 1.0 / d
        delta = d * c
        h *= delta
        if abs(delta - 1.0) < _CF_EPS:
            return h
    raise ArithmeticError(f"incomplete beta continued fraction did not converge (a={a}, b={b})")


def _stirling_correction(z: float) -> float:
    z2 = z * z
    return (1.0 / 12.0 - (1.0 / 360.0 - (1.0 / 1260.0 - 1.0 / (1680.0 * z2)) / z2) / z2) / z


def _log_gamma_ratio(a: float, b: float) -> float:
    """lgamma(a + b) - lgamma(a), accurate when ``a`` is large."""
    if a < 100.0:
        return math.lgamma(a + b) - math.lgamma(a)
    return (
        (a - 0.5) * math.log1p(b / a)
        + b * math.log(a + b)
        - b
        + _stirling_correction(a + b)
        - _stirling_correction(a)
    )


def _log_beta(a: float, b: float) -> float:
    big, small = max(a, b), min(a, b)
    return math.lgamma(small) - _log_gamma_ratio(big, small)


def betainc_regularized(a: float, b: float, x: float, y: float | None = None) -> float:
    """Regularized incomplete beta I_x(a, b).

    ``y`` may carry ``1 - x`` computed without cancellation by the caller.
    """
    if y is None:
        y = 1.0 - x
    if x <= 0.0:
        return 0.0
    if y <= 0.0:
        return 1.0
    log_x = math.log1p(-y) if y < 0.5 else math.log(x)
    log_y = math.log1p(-x) if x < 0.5 else math.log(y)
    log_front = a * log_x + b * log_y - _log_beta(a, b)
    if x < (a + 1.0) / (a + b + 2.0):
        return math.exp(log_front) * _beta_cf(a, b, x) / a
    return 1.0 - math.exp(log_front) * _beta_cf(b, a, y) / b


def t_tail_probability(t: float, df: float) -> float:
    """Two-tailed p-value 2 * P(T >= |t|) for Student's t with ``df`` dof."""
    if not (df > 0) or math.isnan(df):
        raise InvalidDf(f"degrees of freedom must be positive, got {df!r}")
    if math.isnan(t):
        return math.nan
    t2 = t * t
    if math.isinf(t2):
        return 0.0
    if t2 == 0.0:
        return 1.0
    if df > _LARGE_DF:
        return _t_tail_hill(t2, df)
    denom = df + t2
    p = betainc_regularized(df / 2.0, 0.5, df / denom, t2 / denom)
    return min(1.0, max(0.0, p))


def _t_tail_hill(t2: float, df: float) -> float:
    """Hill (1970, CACM algorithm 395): map t to an almost exact normal deviate."""
    a = df - 0.5
    b = 48.0 * a * a
    y = a * math.log1p(t2 / df)
    z = (((((-0.4 * y - 3.3) * y - 24.0) * y - 85.5) / (0.8 * y * y + 100.0 + b) + y + 3.0) / b + 1.0) * math.sqrt(y)
    return math.erfc(z / math.sqrt(2.0))


def f_tail_probability(f: float, d1: float, d2: float) -> float:
    """Upper-tail probability P(F >= f) for the F(d1, d2) distribution."""
    if not (d1 > 0 and d2 > 0):
        raise InvalidDf(f"degrees of freedom must be positive, got ({d1!r}, {d2!r})")
    if math.isnan(f):
        return math.nan
    if f <= 0.0:
        return 1.0
    if math.isinf(f):
        return 0.0
    denom = d2 + d1 * f
    p = betainc_regularized(d2 / 2.0, d1 / 2.0, d2 / denom, d1 * f / denom)
    return min(1.0, max(0.0, p))


# --- descriptive -----------------------------------------------------------

@dataclass(frozen=True)
class DescriptiveStats:
    mean: float
    standard_error: float  # NaN when n == 1
    minimum: float
    maximum: float
    n: int


def describe(series: Sequence[float]) -> DescriptiveStats:
    x = np.asarray(series, dtype=float)
    x = x[~np.isnan(x)]
    n = x.size
    if n == 0:
        raise EmptySeries("no non-missing values")
    mean = float(x.mean())
    se = float(x.std(ddof=1) / math.sqrt(n)) if n > 1 else math.nan
    # mean of identical floats can land one ulp outside [min, max]
    lo, hi = float(x.min()), float(x.max())
    return DescriptiveStats(min(max(mean, lo), hi), se, lo, hi, n)


# --- regression ------------------------------------------------------------

@dataclass
class RegressionResult:
    """Fitted OLS model. Index 0 of every vector is the intercept."""

    names: list[str]
    coefficients: np.ndarray
    classical_se: np.ndarray
    robust_se: np.ndarray
    t_stats: np.ndarray
    p_values: np.ndarray
    r_squared: float
    f_stat: float
    f_p_value: float
    n_used: int
    residuals: np.ndarray
    used_rows: np.ndarray  # bool mask over the input rows
    se_type: str = "classical"  # which SE drives t_stats / p_values
    robust_flavor: str = ROBUST_FLAVOR

    @property
    def k(self) -> int:
        return len(self.coefficients) - 1

    @property
    def df_resid(self) -> int:
        return self.n_used - self.k - 1

    def coef(self, name: str) -> float:
        return float(self.coefficients[self.names.index(name)])

    def p_value(self, name: str) -> float:
        return float(self.p_values[self.names.index(name)])


def _as_design(X, n: int) -> np.ndarray:
    X = np.asarray(X, dtype=float)
    if X.ndim == 1:
        X = X.reshape(-1, 1)
    if X.ndim != 2 or X.shape[0] != n:
        raise ValueError(f"design must have {n} rows, got shape {X.shape}")
    return X


def ols_fit(y, X, robust: bool = False, names: Sequence[str] | None = None) -> RegressionResult:
    """Least-squares fit of ``y`` on ``X`` with an automatic intercept.

    Solved by column-pivoted QR on a unit-norm-scaled design, so currency
    columns and ratio columns can share one model. A pivot smaller than
    ``PIVOT_TOL`` times the largest declares the design collinear.

    Both classical and HC1 standard errors are computed; ``robust`` picks
    the one used for t statistics and p-values. The F statistic is the
    classical joint test of every slope.
    """
    y = np.asarray(y, dtype=float).ravel()
    n_all = y.size
    X = _as_design(X, n_all)
    k = X.shape[1]
    if names is None:
        names = [f"x{j + 1}" for j in range(k)]
    names = ["const"] + list(names)

    used = ~np.isnan(y) & ~np.isnan(X).any(axis=1)
    yv = y[used]
    Z = np.column_stack([np.ones(yv.size), X[used]])
    n = yv.size
    p = k + 1
    if n < k + 3:
        raise TooFewObservations(f"{n} complete rows for {k} regressors; need at least {k + 3}")

    scale = np.sqrt((Z * Z).sum(axis=0))
    if np.any(scale == 0):
        raise RankDeficient("a design column is identically zero")
    Zs = Z / scale
    Q, R, perm = linalg.qr(Zs, mode="economic", pivoting=True)
    diag = np.abs(np.diag(R))
    if diag[-1] <= PIVOT_TOL * diag[0]:
        raise RankDeficient("design columns are collinear")

    beta_p = linalg.solve_triangular(R, Q.T @ yv)
    Rinv = linalg.solve_triangular(R, np.eye(p))
    cov_p = Rinv @ Rinv.T
    beta_s = np.empty(p)
    beta_s[perm] = beta_p
    cov_s = np.empty((p, p))
    cov_s[np.ix_(perm, perm)] = cov_p
    beta = beta_s / scale
    bread = cov_s / np.outer(scale, scale)  # (Z'Z)^-1
    if np.all(yv == yv[0]):
        # exact solution; avoids slopes of rounding-noise size
        beta = np.zeros(p)
        beta[0] = yv[0]

    resid = yv - Z @ beta
    df = n - p
    ssr = float(resid @ resid)
    sigma2 = ssr / df
    classical = np.sqrt(np.maximum(np.diag(bread) * sigma2, 0.0))

    meat = (Z * (resid ** 2)[:, None]).T @ Z
    hc1 = bread @ meat @ bread * (n / df)
    robust_se = np.sqrt(np.maximum(np.diag(hc1), 0.0))

    se = robust_se if robust else classical
    beta = beta + 0.0  # no negative zeros
    with np.errstate(divide="ignore", invalid="ignore"):
        t_stats = beta / se
    # zero SE: an exactly zero coefficient carries no evidence, any other is exact
    t_stats = np.where(se == 0, np.where(beta == 0, 0.0, np.copysign(np.inf, beta)), t_stats)
    p_values = np.array([t_tail_probability(float(t), df) for t in t_stats])

    centered = yv - yv.mean()
    sst = float(centered @ centered)
    if sst == 0.0:
        r2, f_stat, f_p = 0.0, 0.0, 1.0
    else:
        r2 = min(1.0, max(0.0, 1.0 - ssr / sst))
        ssm = max(sst - ssr, 0.0)
        f_stat = math.inf if ssr == 0.0 else (ssm / k) / (ssr / df)
        f_p = f_tail_probability(f_stat, k, df)

    return RegressionResult(
        names=names,
        coefficients=beta,
        classical_se=classical,
        robust_se=robust_se,
        t_stats=t_stats,
        p_values=p_values,
        r_squared=r2,
        f_stat=f_stat,
        f_p_value=f_p,
        n_used=n,
        residuals=resid,
        used_rows=used,
        se_type=ROBUST_FLAVOR if robust else "classical",
    )


# --- two-sample test -------------------------------------------------------

@dataclass(frozen=True)
class WelchResult:
    t: float
    df: float
    p_value: float


def welch_ttest(a: Sequence[float], b: Sequence[float]) -> WelchResult:
    """Unequal-variance two-sample t test with Welch-Satterthwaite df."""
    a = np.asarray(a, dtype=float)
    b = np.asarray(b, dtype=float)
    a = a[~np.isnan(a)]
    b = b[~np.isnan(b)]
    if a.size < 2 or b.size < 2:
        raise GroupTooSmall(f"groups of size {a.size} and {b.size}; need 2 each")
    va = a.var(ddof=1) / a.size
    vb = b.var(ddof=1) / b.size
    if va + vb == 0.0:
        raise ZeroVariance("both groups are constant")
    t = float((a.mean() - b.mean()) / math.sqrt(va + vb))
    df = float((va + vb) ** 2 / (va ** 2 / (a.size - 1) + vb ** 2 / (b.size - 1)))
    return WelchResult(t, df, t_tail_probability(t, df))


# --- rank correlation ------------------------------------------------------

def midranks(x: Sequence[float]) -> np.ndarray:
    """1-based ranks with ties replaced by their average rank."""
    x = np.asarray(x, dtype=float)
    order = np.argsort(x, kind="mergesort")
    ranks = np.empty(x.size)
    xs = x[order]
    i = 0
    while i < x.size:
        j = i
        while j + 1 < x.size and xs[j + 1] == xs[i]:
            j += 1
        ranks[order[i:j + 1]] = (i + j) / 2.0 + 1.0
        i = j + 1
    return ranks


@dataclass(frozen=True)
class CorrelationResult:
    rho: float
    p_value: float
    n: int


def spearman(x: Sequence[float], y: Sequence[float]) -> CorrelationResult:
    """Spearman's rho as the Pearson correlation of midranks.

    The p-value uses t = rho * sqrt((n - 2) / (1 - rho^2)) on n - 2 dof;
    a perfect monotone relation gets p = 0.
    """
    x = np.asarray(x, dtype=float)
    y = np.asarray(y, dtype=float)
    if x.shape != y.shape:
        raise ValueError("x and y must have equal length")
    keep = ~np.isnan(x) & ~np.isnan(y)
    x, y = x[keep], y[keep]
    n = x.size
    if n < 3:
        raise TooFewPairs(f"{n} complete pairs; need at least 3")
    rx = midranks(x)
    ry = midranks(y)
    dx = rx - rx.mean()
    dy = ry - ry.mean()
    sxx = float(dx @ dx)
    syy = float(dy @ dy)
    if sxx == 0.0 or syy == 0.0:
        raise ZeroVariance("a series is constant")
    rho = float(dx @ dy) / math.sqrt(sxx * syy)
    if abs(abs(rho) - 1.0) < 1e-12:
        rho = math.copysign(1.0, rho)
    if abs(rho) == 1.0:
        return CorrelationResult(rho, 0.0, n)
    t = rho * math.sqrt((n - 2) / (1.0 - rho * rho))
    return CorrelationResult(rho, t_tail_probability(t, n - 2), n)


@dataclass
class CorrelationMatrix:
    names: list[str]
    cells: list[list[CorrelationResult | None]]  # None where the pair failed

    def rho(self) -> np.ndarray:
        k = len(self.names)
        out = np.full((k, k), np.nan)
        for i in range(k):
            for j in range(k):
                c = self.cells[i][j]
                if c is not None:
                    out[i, j] = c.rho
        return out

    def get(self, a: str, b: str) -> CorrelationResult | None:
        return self.cells[self.names.index(a)][self.names.index(b)]


def spearman_matrix(columns: Mapping[str, Sequence[float]]) -> CorrelationMatrix:
    names = list(columns)
    if len(names) < 2:
        raise ValueError("need at least two columns")
    data = {k: np.asarray(v, dtype=float) for k, v in columns.items()}
    k = len(names)
    cells: list[list[CorrelationResult | None]] = [[None] * k for _ in range(k)]
    for i, a in enumerate(names):
        n_a = int((~np.isnan(data[a])).sum())
        cells[i][i] = CorrelationResult(1.0, 0.0, n_a)
        for j in range(i):
            try:
                res = spearman(data[a], data[names[j]])
            except (TooFewPairs, ZeroVariance):
                res = None
            cells[i][j] = cells[j][i] = res
    return CorrelationMatrix(names, cells)
