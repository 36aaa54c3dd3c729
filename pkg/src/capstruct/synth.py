"""Synthetic firm panels generated under one capital-structure theory.

These are test scaffolding for recovery checks of the hypothesis battery
and classifier, not economic models. Each theory plants the simplest
linear relation its verdict rule looks for:

- NetIncome: MVF tracks the growth of long-term debt (RTD).
- NetOperatingIncome: MVF tracks EBIT; DER is built with zero sample
  correlation to MVF.
- MM: MVF tracks the discounted expected revenue increment (ETFR); RTD and
  DER are built with zero sample correlation to MVF.
- TradeOff: expense growth falls with debt growth, and MVF is an inverted
  U over a rising DER path, peaking mid-sample.
- PeckingOrder: ``ceil(effect_size * n)`` years (capped at n - 1) rank
  RRE > RTD > REQ; the other years rank them in reverse.
- Agency: ROA rises with LTDA.
- ``theory=None``: no planted relation; MVF is white noise.

``effect_size`` is the MVF shift, in units of ``0.25 * base_scale``, per
standard deviation of the driving variable. ``noise_sd`` is the standard
deviation of the MVF disturbance in currency units.

Random numbers come from SplitMix64 (Steele, Lea & Flood 2014): a 64-bit
counter advanced by 0x9E3779B97F4A7C15 and passed through a fixed
xor-shift-multiply finaliser. Uniforms take the top 53 bits; normals use
Marsaglia's polar method. Output depends only on the seed.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .derive import expected_revenue_increment
from .errors import InvalidSpec
from .ingest import AnnualRecord, FirmPanel, serialize_panel_csv
from .theorylab import Theory

_MASK = (1 << 64) - 1
_SIGNAL = 0.25


class SplitMix64:
    def __init__(self, seed: int):
        self.state = seed & _MASK

    def next_u64(self) -> int:
        self.state = (self.state + 0x9E3779B97F4A7C15) & _MASK
        z = self.state
        z = ((z ^ (z >> 30)) * 0xBF58476D1CE4E5B9) & _MASK
        z = ((z ^ (z >> 27)) * 0x94D049BB133111EB) & _MASK
        return z ^ (z >> 31)

    def uniform(self) -> float:
        """Uniform on [0, 1)."""
        return (self.next_u64() >> 11) * (1.0 / (1 << 53))

    def normal(self) -> float:
        while True:
            u = 2.0 * self.uniform() - 1.0
            v = 2.0 * self.uniform() - 1.0
            s = u * u + v * v
            if 0.0 < s < 1.0:
                return u * math.sqrt(-2.0 * math.log(s) / s)

    def normals(self, n: int) -> np.ndarray:
        return np.array([self.normal() for _ in range(n)])

    def uniforms(self, n: int, lo: float = 0.0, hi: float = 1.0) -> np.ndarray:
        return np.array([lo + (hi - lo) * self.uniform() for _ in range(n)])


@dataclass(frozen=True)
class GeneratorSpec:
    theory: Theory | None
    n_years: int = 12
    base_scale: float = 1e6
    effect_size: float = 2.0
    noise_sd: float = 5e4
    seed: int = 0
    start_year: int = 2011

    def validate(self) -> None:
        if self.theory is not None and not isinstance(self.theory, Theory):
            raise InvalidSpec(f"unknown theory {self.theory!r}")
        if self.n_years < 6:
            raise InvalidSpec("n_years must be at least 6")
        if not (self.base_scale > 0 and math.isfinite(self.base_scale)):
            raise InvalidSpec("base_scale must be positive")
        if not (self.noise_sd >= 0 and math.isfinite(self.noise_sd)):
            raise InvalidSpec("noise_sd must be non-negative")
        if not (self.effect_size >= 0 and math.isfinite(self.effect_size)):
            raise InvalidSpec("effect_size must be non-negative")
        if not -(1 << 63) <= self.seed < (1 << 64):
            raise InvalidSpec("seed must fit in 64 bits")
        if self.start_year < 1900 or self.start_year + self.n_years - 1 > 2100:
            raise InvalidSpec("fiscal years must stay within [1900, 2100]")


def _path(start: float, rates: np.ndarray) -> np.ndarray:
    out = np.empty(rates.size)
    out[0] = start
    for t in range(1, rates.size):
        out[t] = out[t - 1] * (1.0 + rates[t])
    return out


def _zscore(x: np.ndarray) -> np.ndarray:
    ok = ~np.isnan(x)
    out = np.zeros(x.size)
    sd = x[ok].std()
    if sd > 0:
        out[ok] = (x[ok] - x[ok].mean()) / sd
    return out


def _orthogonal_to(rng: SplitMix64, target: np.ndarray) -> np.ndarray:
    """Unit-sd vector with exactly zero sample covariance with ``target``."""
    z = rng.normals(target.size)
    basis = np.column_stack([np.ones(target.size), target])
    coef, *_ = np.linalg.lstsq(basis, z, rcond=None)
    w = z - basis @ coef
    return w / w.std()


def generate_panel(spec: GeneratorSpec) -> FirmPanel:
    spec.validate()
    rng = SplitMix64(spec.seed)
    n = spec.n_years
    B = spec.base_scale
    e = spec.effect_size
    rel = spec.noise_sd / B
    t = np.arange(n, dtype=float)

    # baseline draws, always taken in this order
    assets = _path(10.0 * B, 0.06 + 0.02 * rng.normals(n))
    equity = _path(1.0 * B, np.clip(0.06 + 0.03 * rng.normals(n), -0.3, 0.5))
    retained = _path(0.4 * B, np.clip(0.07 + 0.04 * rng.normals(n), -0.3, 0.5))
    ltda = np.clip(0.15 + 0.02 * rng.normals(n), 0.05, 0.4)
    rev_shock = rng.normals(n)
    expense_ratio = np.clip(0.85 + 0.02 * rng.normals(n), 0.6, 0.98)
    debt_multiple = rng.uniforms(n, 1.25, 1.45)
    mvf_noise = spec.noise_sd * rng.normals(n)
    mvf_free = rng.normals(n)

    ltd = ltda * assets
    revenue = B * (1.0 + 0.06 * t) * (1.0 + 0.03 * rev_shock)
    expenses = revenue * expense_ratio
    mvf = 2.0 * B + 0.2 * B * mvf_free + mvf_noise
    ebit = net_income = der = None
    theory = spec.theory

    if theory is None:
        mvf = 2.0 * B + mvf_noise

    elif theory is Theory.NET_INCOME:
        rtd = np.clip(0.05 + 0.15 * rng.normals(n), -0.4, 0.6)
        rtd[0] = np.nan
        ltd = _path(ltd[0], np.nan_to_num(rtd))
        mvf = B * (2.0 + _SIGNAL * e * _zscore(rtd)) + mvf_noise
        mvf = np.maximum(mvf, 0.05 * B)

    elif theory is Theory.NET_OPERATING_INCOME:
        ebit = revenue - expenses
        mvf = B * (2.0 + _SIGNAL * e * _zscore(ebit)) + mvf_noise
        mvf = np.maximum(mvf, 0.05 * B)
        base = 1.3 * np.max(ltd / equity)
        der = base * (1.0 + 0.05 * _orthogonal_to(rng, mvf))

    elif theory is Theory.MM:
        revenue = B * (1.0 + 0.06 * t) * (1.0 + 0.08 * rev_shock)
        expenses = revenue * expense_ratio
        # expected revenue increment discounted one year at 10%
        pv = expected_revenue_increment(revenue) / 1.1
        mvf = B * (2.0 + _SIGNAL * e * _zscore(pv)) + mvf_noise
        mvf = np.maximum(mvf, 0.05 * B)
        rtd = np.zeros(n)
        rtd[1:] = 0.05 + 0.08 * _orthogonal_to(rng, mvf[1:])
        ltd = _path(ltd[0], rtd)
        base = 1.3 * np.max(ltd / equity)
        der = base * (1.0 + 0.05 * _orthogonal_to(rng, mvf))

    elif theory is Theory.TRADE_OFF:
        rtd = np.clip(0.05 + 0.1 * rng.normals(n), -0.25, 0.35)
        rtd[0] = 0.0
        ltd = _path(ltd[0], rtd)
        rex = 0.06 - _SIGNAL * e * (rtd - rtd[1:].mean()) + 0.1 * rel * rng.normals(n)
        expenses = _path(expenses[0], np.clip(rex, -0.5, 0.8))
        low = 1.3 * np.max(ltd / equity)
        der = low * (1.0 + t / (n - 1)) * (1.0 + 0.01 * rng.normals(n))
        centre, half = 1.5 * low, 0.5 * low
        mvf = B * (1.0 + e * (1.0 - ((der - centre) / half) ** 2)) + mvf_noise
        mvf = np.maximum(mvf, 0.05 * B)

    elif theory is Theory.PECKING_ORDER:
        m = min(math.ceil(e * n), n - 1)
        slots = list(range(1, n))
        for i in range(len(slots) - 1, 0, -1):  # Fisher-Yates
            j = int(rng.uniform() * (i + 1))
            slots[i], slots[j] = slots[j], slots[i]
        chosen = set(slots[:m])
        jitter = rng.uniforms(3 * n, -0.03, 0.03).reshape(3, n)
        high, mid, low = 0.20 + jitter[0], 0.10 + jitter[1], 0.00 + jitter[2]
        followed = np.array([i in chosen for i in range(n)])
        rre = np.where(followed, high, low)
        req = np.where(followed, low, high)
        retained = _path(retained[0], rre)
        ltd = _path(ltd[0], mid)
        equity = _path(equity[0], req)

    elif theory is Theory.AGENCY:
        ltda = np.clip(0.15 + 0.04 * rng.normals(n), 0.03, 0.4)
        ltd = ltda * assets
        roa = 0.01 + 0.01 * _SIGNAL * e * _zscore(ltda) + 0.01 * rel * rng.normals(n)
        net_income = roa * assets
        ebit = net_income / 0.7
        expenses = revenue - ebit

    if ebit is None:
        ebit = revenue - expenses
    if net_income is None:
        net_income = 0.7 * ebit
    total_debt = der * equity if der is not None else ltd * debt_multiple
    shares = B / 50.0
    eps = net_income / shares
    price = mvf / shares

    records = []
    for i in range(n):
        interest = 0.07 * total_debt[i]
        records.append(AnnualRecord(
            fiscal_year=spec.start_year + i,
            long_term_debt=float(ltd[i]),
            total_debt=float(total_debt[i]),
            equity=float(equity[i]),
            retained_earnings=float(retained[i]),
            total_assets=float(assets[i]),
            revenue=float(revenue[i]),
            total_expenses=float(expenses[i]),
            ebit=float(ebit[i]),
            net_income=float(net_income[i]),
            market_value=float(mvf[i]),
            eps=float(eps[i]),
            interest_expense=float(interest),
            debt_service=float(interest + 0.1 * ltd[i]),
            dividends_per_share=float(max(0.3 * eps[i], 0.0)),
            price_year_end=float(price[i]),
            sales_per_share=float(revenue[i] / shares),
        ))
    name = theory.value if theory is not None else "Null"
    return FirmPanel(f"SYN-{name}-{spec.seed}", tuple(records))


def generate_csv(spec: GeneratorSpec) -> str:
    return serialize_panel_csv(generate_panel(spec))


def parse_theory(text: str) -> Theory | None:
    key = text.strip().lower().replace("-", "").replace("_", "").replace(" ", "")
    aliases = {
        "ni": Theory.NET_INCOME, "netincome": Theory.NET_INCOME,
        "noi": Theory.NET_OPERATING_INCOME, "netoperatingincome": Theory.NET_OPERATING_INCOME,
        "mm": Theory.MM, "modiglianimiller": Theory.MM,
        "tradeoff": Theory.TRADE_OFF, "traditional": Theory.TRADE_OFF,
        "peckingorder": Theory.PECKING_ORDER, "pecking": Theory.PECKING_ORDER,
        "agency": Theory.AGENCY,
        "null": None, "none": None,
    }
    if key not in aliases:
        raise InvalidSpec(f"unknown theory {text!r}")
    return aliases[key]
