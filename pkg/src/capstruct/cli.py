"""Command-line entry point.

Exit codes: 0 success, 1 invalid input data, 2 usage errors (bad flags,
unreadable files, unknown format or theory).
"""

from __future__ import annotations

import argparse
import logging
import sys
from pathlib import Path

from . import benchmarks as bm
from .config import DEFAULT, ConfigError, load_config
from .derive import DESCRIPTIVE_ORDER, compute_derived_series
from .errors import CapStructError, EmptySeries, InvalidSpec, UnsupportedFormat
from .ingest import Dataset, load_panel, load_prices, validate_panel
from .pipeline import analyze_dataset
from .report import FORMATS, build_bundle, descriptive_table, render_report, screen_table
from .stats import describe
from .synth import GeneratorSpec, generate_csv, parse_theory

EXTENSIONS = {"md": "md", "csv": "csv", "json": "json"}


class UsageError(Exception):
    pass


def _load_panels(paths: list[str]) -> Dataset:
    ds = Dataset()
    for p in paths:
        try:
            ds.add_panel(load_panel(p))
        except OSError as exc:
            raise UsageError(f"cannot read {p}: {exc.strerror or exc}") from None
    return ds


def _attach_prices(ds: Dataset, paths: list[str]) -> None:
    for p in paths:
        try:
            series = load_prices(p)
        except OSError as exc:
            raise UsageError(f"cannot read {p}: {exc.strerror or exc}") from None
        if series.firm_id not in ds.panels and len(ds.panels) == 1:
            (only,) = ds.panels
            series = type(series)(only, series.observations)
        ds.add_prices(series)


def _check(ds: Dataset) -> None:
    for panel in ds.panels.values():
        report = validate_panel(panel)
        for f in report.errors:
            print(f"{panel.firm_id}: error {f.code}: {f.message}", file=sys.stderr)
        if not report.ok:
            raise CapStructError(f"{panel.firm_id} failed validation")


def cmd_analyze(args) -> int:
    if args.format.lower() not in FORMATS:
        raise UsageError(f"unsupported format {args.format!r}")
    config = DEFAULT
    if args.config:
        try:
            config = load_config(args.config)
        except OSError as exc:
            raise UsageError(f"cannot read {args.config}: {exc.strerror or exc}") from None
    ds = _load_panels(args.panels)
    _attach_prices(ds, args.prices)
    _check(ds)
    analyses = analyze_dataset(ds, config, wacc=args.wacc, roi=args.roi)
    text = render_report(build_bundle(analyses), args.format)
    if args.out:
        out = Path(args.out)
        out.mkdir(parents=True, exist_ok=True)
        target = out / f"report.{EXTENSIONS[FORMATS[args.format.lower()]]}"
        target.write_text(text, encoding="utf-8")
        print(target)
    else:
        sys.stdout.write(text)
    return 0


def cmd_screen(args) -> int:
    ds = _load_panels([args.panel])
    _check(ds)
    (panel,) = ds.panels.values()
    inputs = bm.inputs_from_panel(panel, wacc=args.wacc, roi=args.roi)
    results = bm.screen_ratios(inputs) + bm.screen_quant(inputs)
    lines = screen_table(panel.firm_id, panel.years[-1], results, None)
    sys.stdout.write("\n".join(lines))
    return 0


def cmd_describe(args) -> int:
    ds = _load_panels([args.panel])
    _check(ds)
    (panel,) = ds.panels.values()
    derived = compute_derived_series(panel)
    stats = {}
    for name in DESCRIPTIVE_ORDER:
        try:
            stats[name] = describe(derived.column(name))
        except EmptySeries:
            stats[name] = None
    sys.stdout.write("\n".join(descriptive_table({panel.firm_id: stats})))
    return 0


def cmd_simulate(args) -> int:
    try:
        theory = parse_theory(args.theory)
        spec = GeneratorSpec(theory, n_years=args.years, seed=args.seed)
        sys.stdout.write(generate_csv(spec))
    except InvalidSpec as exc:
        raise UsageError(str(exc)) from None
    return 0


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="capstruct", description="Capital structure diagnostics for firm panels.")
    ap.add_argument("-v", "--verbose", action="store_true", help="log data warnings")
    sub = ap.add_subparsers(dest="command", required=True)

    a = sub.add_parser("analyze", help="run the full pipeline and render a report")
    a.add_argument("panels", nargs="+", metavar="panel.csv")
    a.add_argument("--prices", action="append", default=[], metavar="FILE",
                   help="daily price CSV (date, close[, firm_id]); repeatable")
    a.add_argument("--out", metavar="DIR", help="write report.<ext> here instead of stdout")
    a.add_argument("--format", default="md", help="md, csv or json")
    a.add_argument("--wacc", type=float)
    a.add_argument("--roi", type=float)
    a.add_argument("--config", metavar="FILE", help="key = value overrides")
    a.set_defaults(func=cmd_analyze)

    s = sub.add_parser("screen", help="benchmark screens for the latest year")
    s.add_argument("panel", metavar="panel.csv")
    s.add_argument("--wacc", type=float)
    s.add_argument("--roi", type=float)
    s.set_defaults(func=cmd_screen)

    m = sub.add_parser("simulate", help="print a synthetic panel CSV")
    m.add_argument("--theory", required=True, help="ni, noi, mm, tradeoff, pecking, agency or null")
    m.add_argument("--seed", type=int, default=0)
    m.add_argument("--years", type=int, default=12)
    m.set_defaults(func=cmd_simulate)

    d = sub.add_parser("describe", help="descriptive statistics of the derived variables")
    d.add_argument("panel", metavar="panel.csv")
    d.set_defaults(func=cmd_describe)
    return ap


def main(argv: list[str] | None = None) -> int:
    ap = build_parser()
    try:
        args = ap.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    logging.basicConfig(level=logging.WARNING if args.verbose else logging.ERROR,
                        format="%(levelname)s %(message)s")
    try:
        return args.func(args)
    except (UsageError, UnsupportedFormat, ConfigError) as exc:
        print(f"capstruct: {exc}", file=sys.stderr)
        return 2
    except CapStructError as exc:
        print(f"capstruct: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
