"""Report rendering: Markdown tables, long-format CSV, and structured JSON.

Statistics are stored unrounded; rounding happens only when Markdown is
printed. The CSV and JSON forms carry the same list of cells::

    table    T3 | T4 | EQ1 | T5 | T6 | T78 | TECH | TTEST | VERDICT | NOTE
    firm     firm id ("" for cross-firm cells)
    row      variable, hypothesis or benchmark
    column   statistic name
    value    float, or empty/null
    text     string payload (stars, statuses, labels), or empty/null
    n_used   observations behind the value, or empty/null
    years    fiscal years behind the value (space separated in CSV)
    method   estimator flags

JSON wraps the cells as ``{"schema": "capstruct.report/1", "firms": [...],
"notes": [...], "cells": [...]}``. Floats are written with ``repr`` so both
forms read back bit-for-bit.
"""

from __future__ import annotations

import csv
import io
import json
import math
from dataclasses import asdict, dataclass, field
from typing import Iterable, Mapping

import numpy as np

from .benchmarks import QUALITATIVE, ScreenResult
from .derive import DESCRIPTIVE_ORDER, METHOD_NOTES
from .errors import UnsupportedFormat
from .pipeline import FirmAnalysis, GroupComparison, Technicals, leverage_group_test
from .stats import ROBUST_FLAVOR, CorrelationMatrix, DescriptiveStats, RegressionResult
from .theorylab import (
    HYPOTHESES,
    STAR_NOTE,
    HypothesisOutcome,
    PeakResult,
    PeckingOrderResult,
    Status,
    TheoryVerdict,
    stars,
)

SCHEMA = "capstruct.report/1"
FORMATS = {"md": "md", "markdown": "md", "csv": "csv", "json": "json", "structured": "json"}
CELL_FIELDS = ("table", "firm", "row", "column", "value", "text", "n_used", "years", "method")
TABLE4_FOOTER = "Robust standard errors in parentheses, " + STAR_NOTE + "."

TABLE4_BLOCKS = (
    ("DV: Market value of the firm", ("H11", "H12", "H13", "H14")),
    ("DV: Rate of change in expenses", ("H15",)),
    ("DV: Return on assets", ("H16", "H18")),
    ("DV: Return on equity", ("H17",)),
)
_HYP = {h.id: h for h in HYPOTHESES}


@dataclass
class Cell:
    table: str
    firm: str
    row: str
    column: str
    value: float | None = None
    text: str | None = None
    n_used: int | None = None
    years: tuple[int, ...] = ()
    method: str = ""

    def __post_init__(self):
        # CSV cannot tell "" from missing, so neither does the cell
        if self.text == "":
            self.text = None


@dataclass
class ReportBundle:
    firms: list[str]
    years: dict[str, tuple[int, ...]]
    descriptive: dict[str, dict[str, DescriptiveStats | None]]
    hypotheses: dict[str, list[HypothesisOutcome]]
    pooled: dict[str, RegressionResult | None]
    peaks: dict[str, PeakResult]
    pecking: dict[str, PeckingOrderResult]
    correlations: dict[str, CorrelationMatrix]
    screens: dict[str, list[ScreenResult]]
    technicals: dict[str, Technicals | None]
    verdicts: dict[str, list[TheoryVerdict]]
    columns: dict[str, dict[str, np.ndarray]] = field(default_factory=dict)  # derived series
    group_test: GroupComparison | None = None
    notes: list[str] = field(default_factory=list)


def _notes(p_flavor: str) -> list[str]:
    return [
        f"ETFR: {METHOD_NOTES['ETFR']}.",
        f"LTDR: {METHOD_NOTES['LTDR']}; DER: {METHOD_NOTES['DER']}.",
        f"Rates: {METHOD_NOTES['RATES']}.",
        f"Hypothesis p-values use {p_flavor} standard errors; robust standard errors are {ROBUST_FLAVOR}.",
        "H16 and H17 are Spearman rank correlations (R square = rho^2); H18 is the joint F test.",
        "The MM verdict rule is a reconstruction: leverage terms insignificant, ETFR significant.",
    ]


def build_bundle(analyses: Iterable[FirmAnalysis]) -> ReportBundle:
    analyses = sorted(analyses, key=lambda a: a.firm_id)
    by = {a.firm_id: a for a in analyses}
    firms = list(by)
    robust = any(a.config.robust_pvalues for a in analyses)
    return ReportBundle(
        firms=firms,
        years={f: by[f].derived.years for f in firms},
        descriptive={f: by[f].descriptive for f in firms},
        hypotheses={f: by[f].hypotheses for f in firms},
        pooled={f: by[f].pooled for f in firms},
        peaks={f: by[f].peak for f in firms},
        pecking={f: by[f].pecking for f in firms},
        correlations={f: by[f].correlations for f in firms},
        screens={f: by[f].screen for f in firms},
        technicals={f: by[f].technicals for f in firms},
        verdicts={f: by[f].verdicts for f in firms},
        columns={f: by[f].derived.as_dict() for f in firms},
        group_test=leverage_group_test(analyses),
        notes=_notes(ROBUST_FLAVOR if robust else "classical"),
    )


# --- number formatting -----------------------------------------------------

def _f(x) -> float | None:
    if x is None:
        return None
    x = float(x)
    return None if math.isnan(x) or math.isinf(x) else x


def fixed6(x) -> str:
    x = _f(x)
    return "n/a" if x is None else f"{x:.6f}"


def num(x) -> str:
    x = _f(x)
    if x is None:
        return "n/a"
    if x != 0 and (abs(x) >= 1e6 or abs(x) < 1e-4):
        return f"{x:.6e}"
    return f"{x:.6f}"


def p_cell(p: float, mark: str) -> str:
    """Table 4 p-value cell, e.g. ``0.004000***``."""
    return "n/a" if _f(p) is None else f"{p:.6f}{mark}"


def _md_table(header: list[str], rows: list[list[str]]) -> list[str]:
    out = ["| " + " | ".join(header) + " |", "|" + "---|" * len(header)]
    out += ["| " + " | ".join(r) + " |" for r in rows]
    return out


# --- cells -----------------------------------------------------------------

def _outcome_cells(firm: str, o: HypothesisOutcome) -> list[Cell]:
    method = o.method
    if o.method == "ols":
        method = "ols joint-F" if len(o.regressors) > 1 else "ols t"
        if o.regression is not None:
            method += f" p:{o.regression.se_type} se:{o.regression.robust_flavor}"
    elif o.method == "spearman":
        method = "spearman midrank t-approx"
    row = f"{o.id} {'+'.join(o.regressors)}->{o.dependent}"
    kw = dict(n_used=o.n_used, years=o.years_used, method=method)
    cells = [
        Cell("T4", firm, row, "r_squared", _f(o.r_squared), **kw),
        Cell("T4", firm, row, "p_value", _f(o.p_value), text=o.stars, **kw),
        Cell("T4", firm, row, "estimate", _f(o.estimate), **kw),
    ]
    if o.method == "ols":
        cells.append(Cell("T4", firm, row, "robust_se", _f(o.robust_se), **kw))
    if o.pooled_p_value is not None:
        cells.append(Cell("T4", firm, row, "pooled_p_value", _f(o.pooled_p_value), **kw))
    if o.error:
        cells.append(Cell("T4", firm, row, "error", text=o.error, **kw))
    return cells


def regression_cells(outcomes: Mapping[str, list[HypothesisOutcome]]) -> list[Cell]:
    cells = []
    for firm in sorted(outcomes):
        for o in sorted(outcomes[firm], key=lambda o: o.id):
            cells += _outcome_cells(firm, o)
    return cells


def _years_where(years: tuple[int, ...], *columns) -> tuple[int, ...]:
    """Years in which every given column is present."""
    return tuple(y for i, y in enumerate(years) if not any(math.isnan(c[i]) for c in columns))


def bundle_cells(bundle: ReportBundle) -> list[Cell]:
    cells = [Cell("NOTE", "", str(i + 1), "note", text=t) for i, t in enumerate(bundle.notes)]
    for firm in bundle.firms:
        years = bundle.years[firm]
        for var in DESCRIPTIVE_ORDER:
            d = bundle.descriptive[firm].get(var)
            if d is None:
                continue
            for stat in ("mean", "standard_error", "minimum", "maximum"):
                cells.append(Cell("T3", firm, var, stat, _f(getattr(d, stat)), n_used=d.n,
                                  years=_years_where(years, bundle.columns[firm][var]),
                                  method="descriptive se=sd/sqrt(n)"))

    cells += regression_cells(bundle.hypotheses)

    for firm in bundle.firms:
        fit = bundle.pooled[firm]
        if fit is None:
            cells.append(Cell("EQ1", firm, "model", "error", text="not estimable"))
            continue
        used = tuple(y for y, m in zip(bundle.years[firm], fit.used_rows) if m)
        kw = dict(n_used=fit.n_used, years=used, method=f"ols p:{fit.se_type} se:{fit.robust_flavor}")
        for i, name in enumerate(fit.names):
            cells.append(Cell("EQ1", firm, name, "coefficient", _f(fit.coefficients[i]), **kw))
            cells.append(Cell("EQ1", firm, name, "classical_se", _f(fit.classical_se[i]), **kw))
            cells.append(Cell("EQ1", firm, name, "robust_se", _f(fit.robust_se[i]), **kw))
            cells.append(Cell("EQ1", firm, name, "p_value", _f(fit.p_values[i]), **kw))
        cells.append(Cell("EQ1", firm, "model", "r_squared", _f(fit.r_squared), **kw))
        cells.append(Cell("EQ1", firm, "model", "f_stat", _f(fit.f_stat), **kw))
        cells.append(Cell("EQ1", firm, "model", "f_p_value", _f(fit.f_p_value), **kw))

    for firm in bundle.firms:
        pk, po = bundle.peaks[firm], bundle.pecking[firm]
        years = bundle.years[firm]
        kw = dict(n_used=pk.n_years, years=years, method="argmax MVF, earliest on ties")
        cells.append(Cell("T5", firm, "peak", "peak_year", float(pk.peak_year), **kw))
        cells.append(Cell("T5", firm, "peak", "peak_mvf", _f(pk.peak_mvf), **kw))
        cells.append(Cell("T5", firm, "peak", "contemporaneous_der", _f(pk.contemporaneous_der), **kw))
        if pk.lag_der is None:
            cells.append(Cell("T5", firm, "peak", "lag_der", text="---", **kw))
        else:
            cells.append(Cell("T5", firm, "peak", "lag_der", _f(pk.lag_der), **kw))
        usable = tuple(sorted(po.per_year))
        kw = dict(n_used=po.n_usable, years=usable, method="RRE>RTD>REQ")
        cells.append(Cell("T5", firm, "pecking", "years_followed", float(po.years_followed), **kw))
        cells.append(Cell("T5", firm, "pecking", "n_usable", float(po.n_usable), **kw))
        for y in usable:
            cells.append(Cell("T5", firm, "pecking", str(y),
                              text="followed" if po.per_year[y] else "not followed", **kw))

    for firm in bundle.firms:
        cm = bundle.correlations[firm]
        cols = bundle.columns[firm]
        for i, a in enumerate(cm.names):
            for j in range(i + 1):
                b = cm.names[j]
                c = cm.cells[i][j]
                kw = dict(method="spearman pairwise", years=_years_where(bundle.years[firm], cols[a], cols[b]))
                if c is None:
                    cells.append(Cell("T6", firm, a, b, text="n/a", **kw))
                    continue
                cells.append(Cell("T6", firm, a, b, _f(c.rho), n_used=c.n, **kw))
                if i != j:
                    cells.append(Cell("T6", firm, a, b + ":p", _f(c.p_value), n_used=c.n, **kw))

    for firm in bundle.firms:
        last = (bundle.years[firm][-1],)
        for s in bundle.screens[firm]:
            cells.append(Cell("T78", firm, s.name, "value", _f(s.value), text=s.status.value,
                              years=last, method=f"table {s.table}: {s.threshold}"))

    for firm in bundle.firms:
        tech = bundle.technicals[firm]
        if tech is None:
            continue
        span = sorted({d.year for series in tech.moving_averages.values() if series for d, _ in series})
        if tech.rsi is not None:
            span = sorted(set(span) | {d.year for d, _ in tech.rsi.values})
        span = tuple(span)
        for w, series in sorted(tech.moving_averages.items()):
            if series is None:
                cells.append(Cell("TECH", firm, f"SMA{w}", "latest", text="insufficient data"))
            else:
                cells.append(Cell("TECH", firm, f"SMA{w}", "latest", series[-1][1],
                                  text=series[-1][0].isoformat(), n_used=len(series), years=span,
                                  method="simple"))
        if tech.rsi is None:
            cells.append(Cell("TECH", firm, "RSI", "latest", text="insufficient data"))
        else:
            d, v = tech.rsi.values[-1]
            cells.append(Cell("TECH", firm, "RSI", "latest", v, text=tech.rsi.label,
                              n_used=len(tech.rsi.values), years=span, method=f"wilder {d.isoformat()}"))

    g = bundle.group_test
    if g is not None:
        pooled_years = set()
        for f in bundle.firms:
            c = bundle.columns[f]
            pooled_years.update(_years_where(bundle.years[f], c["DER"], c[g.variable]))
        kw = dict(method=f"welch {g.split}", years=tuple(sorted(pooled_years)))
        for col, val in (("threshold", g.threshold), ("mean_high", g.mean_high), ("mean_low", g.mean_low),
                         ("t", g.test.t), ("df", g.test.df), ("p_value", g.test.p_value)):
            cells.append(Cell("TTEST", "", g.variable, col, _f(val), n_used=g.n_high + g.n_low, **kw))

    for firm in bundle.firms:
        for v in bundle.verdicts[firm]:
            cells.append(Cell("VERDICT", firm, v.theory.value, "status", text=v.status.value,
                              method=" | ".join(v.evidence)))
    return cells


def _cells_json(cells: list[Cell], firms: list[str], notes: list[str]) -> str:
    doc = {
        "schema": SCHEMA,
        "firms": firms,
        "notes": notes,
        "cells": [dict(asdict(c), years=list(c.years)) for c in cells],
    }
    return json.dumps(doc, indent=1, allow_nan=False) + "\n"


def _cells_csv(cells: list[Cell]) -> str:
    out = io.StringIO()
    w = csv.writer(out, lineterminator="\n")
    w.writerow(CELL_FIELDS)
    for c in cells:
        w.writerow([
            c.table, c.firm, c.row, c.column,
            "" if c.value is None else repr(c.value),
            "" if c.text is None else c.text,
            "" if c.n_used is None else c.n_used,
            " ".join(str(y) for y in c.years),
            c.method,
        ])
    return out.getvalue()


def parse_report_csv(text: str) -> list[Cell]:
    """Read cells back from the CSV form."""
    cells = []
    for row in csv.DictReader(io.StringIO(text)):
        cells.append(Cell(
            table=row["table"], firm=row["firm"], row=row["row"], column=row["column"],
            value=float(row["value"]) if row["value"] else None,
            text=row["text"] or None,
            n_used=int(row["n_used"]) if row["n_used"] else None,
            years=tuple(int(y) for y in row["years"].split()),
            method=row["method"],
        ))
    return cells


def parse_report_json(text: str) -> list[Cell]:
    doc = json.loads(text)
    if doc.get("schema") != SCHEMA:
        raise ValueError(f"unexpected schema {doc.get('schema')!r}")
    return [Cell(**dict(c, years=tuple(c["years"]))) for c in doc["cells"]]


def _fmt(fmt: str) -> str:
    try:
        return FORMATS[fmt.lower()]
    except KeyError:
        raise UnsupportedFormat(f"unsupported format {fmt!r}; use md, csv or json") from None


# --- markdown sections -----------------------------------------------------

def _table4_md(outcomes: Mapping[str, list[HypothesisOutcome]]) -> list[str]:
    firms = sorted(outcomes)
    lines = ["## Table 4. Linear relationship between the variables of interest", ""]
    if firms:
        by = {f: {o.id: o for o in outcomes[f]} for f in firms}
        rows = []
        for title, ids in TABLE4_BLOCKS:
            rows.append([f"**{title}**", ""] + [""] * len(firms))
            for hid in ids:
                h = _HYP[hid]
                label = " + ".join(h.regressors)
                if h.method == "spearman":
                    label += " (rank corr.)"
                elif len(h.regressors) > 1:
                    label += " (joint F)"
                r2, pv, extra = [label, "R square"], ["", "P-VALUE"], ["", ""]
                for f in firms:
                    o = by[f].get(hid)
                    if o is None or not o.ok:
                        r2.append("n/a"); pv.append("n/a"); extra.append("")
                        continue
                    r2.append(fixed6(o.r_squared))
                    pv.append(p_cell(o.p_value, o.stars))
                    if o.method == "spearman":
                        extra[1] = "rho"
                        extra.append(fixed6(o.estimate))
                    else:
                        extra[1] = extra[1] or "(robust SE)"
                        extra.append(f"({num(o.robust_se)})")
                rows += [r2, pv]
                if extra[1]:
                    rows.append(extra)
        lines += _md_table(["", ""] + firms, rows)
        lines.append("")
    lines.append(TABLE4_FOOTER)
    return lines


def render_regression_table(outcomes: Mapping[str, list[HypothesisOutcome]], format: str = "md") -> str:
    """Table 4 layout: a block per dependent variable, firms as columns."""
    kind = _fmt(format)
    if kind == "md":
        return "\n".join(_table4_md(outcomes)) + "\n"
    cells = regression_cells(outcomes)
    cells.append(Cell("NOTE", "", "T4", "footer", text=TABLE4_FOOTER))
    if kind == "csv":
        return _cells_csv(cells)
    return _cells_json(cells, sorted(outcomes), [TABLE4_FOOTER])


def descriptive_table(descriptive: Mapping[str, Mapping[str, DescriptiveStats | None]]) -> list[str]:
    """Table 3 layout, three firms per block, firms alphabetical."""
    firms = sorted(descriptive)
    lines = ["## Table 3. Descriptive statistics", ""]
    groups = [firms[i:i + 3] for i in range(0, len(firms), 3)]
    for part, chunk in enumerate(groups):
        if len(groups) > 1:
            lines += [f"### Table 3.{chr(ord('a') + part)}", ""]
        header = [""]
        for f in chunk:
            header += [f"{f} Mean", "Standard Error", "Minimum", "Maximum"]
        rows = []
        for var in DESCRIPTIVE_ORDER:
            row = [var]
            for f in chunk:
                d = descriptive[f].get(var)
                if d is None:
                    row += ["n/a"] * 4
                else:
                    row += [num(d.mean), num(d.standard_error), num(d.minimum), num(d.maximum)]
            rows.append(row)
        lines += _md_table(header, rows) + [""]
    return lines


def _pooled_md(bundle: ReportBundle) -> list[str]:
    lines = ["## Pooled MVF model (RTD, EBIT, DER, ETFR)", ""]
    rows = []
    for f in bundle.firms:
        fit = bundle.pooled[f]
        if fit is None:
            rows.append([f] + ["n/a"] * 8)
            continue
        row = [f]
        for i in range(1, len(fit.names)):
            row.append(f"{num(fit.coefficients[i])} ({num(fit.robust_se[i])}){_stars(fit.p_values[i])}")
        row += [fixed6(fit.r_squared), num(fit.f_stat), fixed6(fit.f_p_value), str(fit.n_used)]
        rows.append(row)
    lines += _md_table(["Firm", "RTD", "EBIT", "DER", "ETFR", "R square", "F", "F p-value", "n"], rows)
    lines += ["", TABLE4_FOOTER, ""]
    return lines


def _stars(p) -> str:
    return "" if _f(p) is None else stars(float(p))


def _table5_md(bundle: ReportBundle) -> list[str]:
    ns = sorted({len(bundle.years[f]) for f in bundle.firms})
    n_label = "/".join(str(n) for n in ns) or "-"
    lines = ["## Table 5. Peak value of MVF and pecking order verification", ""]
    rows = []
    for f in bundle.firms:
        pk, po = bundle.peaks[f], bundle.pecking[f]
        lag = "---" if pk.lag_der is None else num(pk.lag_der)
        rows.append([f, lag, num(pk.contemporaneous_der), num(pk.peak_mvf), str(pk.peak_year),
                     str(po.years_followed), str(po.n_usable)])
    lines += _md_table(["Firm", "Lag Effect", "Contemporaneous Effect", "Peak Value", "Peak Year",
                        f"No of Years Followed (For n={n_label})", "Usable Years"], rows)
    return lines + [""]


def _table6_md(bundle: ReportBundle) -> list[str]:
    lines = []
    for k, f in enumerate(bundle.firms):
        cm = bundle.correlations[f]
        lines += [f"## Table 6.{chr(ord('a') + k) if k < 26 else k} Correlation matrix for the variables of {f}", ""]
        rows = []
        for i, a in enumerate(cm.names):
            row = [a]
            for j in range(len(cm.names)):
                if j > i:
                    row.append("")
                elif i == j:
                    row.append("1")
                else:
                    c = cm.cells[i][j]
                    row.append("n/a" if c is None else fixed6(c.rho))
            rows.append(row)
        lines += _md_table([""] + cm.names, rows) + [""]
    return lines


def _ttest_md(g: GroupComparison | None) -> list[str]:
    if g is None:
        return []
    return [
        "## Group comparison (Welch t-test)", "",
        f"{g.variable} for firm-years with {g.split} (cut {num(g.threshold)}): "
        f"mean {num(g.mean_high)} (n={g.n_high}) vs {num(g.mean_low)} (n={g.n_low}); "
        f"t = {num(g.test.t)}, df = {num(g.test.df)}, p = {fixed6(g.test.p_value)}{_stars(g.test.p_value)}.",
        "",
    ]


def screen_table(firm: str, year: int, screens: list[ScreenResult], tech: Technicals | None) -> list[str]:
    lines = [f"### {firm} ({year})", ""]
    rows = [[f"Table {s.table}", s.name, num(s.value), s.threshold, s.status.value] for s in screens]
    if tech is None:
        rows.append(["Table 7", "Moving average", "n/a", "", "no price series supplied"])
        rows.append(["Table 7", "Relative strength index", "n/a", "", "no price series supplied"])
    else:
        for w, series in sorted(tech.moving_averages.items()):
            if series is None:
                rows.append(["Table 7", f"Moving average ({w} day)", "n/a", "", "insufficient data"])
            else:
                rows.append(["Table 7", f"Moving average ({w} day)", num(series[-1][1]),
                             f"as of {series[-1][0].isoformat()}", ""])
        if tech.rsi is None:
            rows.append(["Table 7", "Relative strength index", "n/a", "", "insufficient data"])
        else:
            rows.append(["Table 7", "Relative strength index", fixed6(tech.rsi.values[-1][1]),
                         "above 70 overbought, below 30 oversold", tech.rsi.label])
    for name, status in QUALITATIVE:
        rows.append(["Table 7", name, "", "qualitative", status])
    return lines + _md_table(["Source", "Benchmark", "Value", "Standard", "Status"], rows) + [""]


def _screen_md(bundle: ReportBundle) -> list[str]:
    lines = ["## Tables 7-8. Benchmark screening (latest fiscal year)", ""]
    for f in bundle.firms:
        lines += screen_table(f, bundle.years[f][-1], bundle.screens[f], bundle.technicals[f])
    return lines


def _join(items: list[str]) -> str:
    if len(items) == 1:
        return items[0]
    return ", ".join(items[:-1]) + " and " + items[-1]


def verdict_sentence(firm: str, verdicts: list[TheoryVerdict]) -> str:
    groups = {s: [v.theory.label for v in verdicts if v.status is s] for s in Status}
    parts = []
    if groups[Status.FOLLOWED]:
        parts.append("followed the " + _join(groups[Status.FOLLOWED]))
    if groups[Status.PARTIAL]:
        parts.append("partially followed the " + _join(groups[Status.PARTIAL]))
    if groups[Status.NOT_FOLLOWED]:
        parts.append("did not follow the " + _join(groups[Status.NOT_FOLLOWED]))
    return f"{firm} " + "; ".join(parts) + "."


def _verdicts_md(bundle: ReportBundle) -> list[str]:
    lines = ["## Interpretation", ""]
    for f in bundle.firms:
        lines += [verdict_sentence(f, bundle.verdicts[f]), ""]
        rows = [[v.theory.value, v.status.value, "; ".join(v.evidence)] for v in bundle.verdicts[f]]
        lines += _md_table(["Theory", "Status", "Evidence"], rows) + [""]
    return lines


def render_markdown(bundle: ReportBundle) -> str:
    lines = ["# Capital structure diagnostics", "", "Firms: " + (", ".join(bundle.firms) or "none"), ""]
    lines += ["Method notes:", ""] + [f"- {n}" for n in bundle.notes] + [""]
    lines += descriptive_table(bundle.descriptive)
    lines += _table4_md(bundle.hypotheses) + [""]
    lines += _pooled_md(bundle)
    lines += _table5_md(bundle)
    lines += _table6_md(bundle)
    lines += _ttest_md(bundle.group_test)
    lines += _screen_md(bundle)
    lines += _verdicts_md(bundle)
    return "\n".join(lines).rstrip("\n") + "\n"


def render_report(bundle: ReportBundle, format: str = "md") -> str:
    kind = _fmt(format)
    if kind == "md":
        return render_markdown(bundle)
    cells = bundle_cells(bundle)
    if kind == "csv":
        return _cells_csv(cells)
    return _cells_json(cells, bundle.firms, bundle.notes)
