"""Capital structure diagnostics for firm-level annual panels."""

from .config import DEFAULT, Config, load_config, parse_config
from .derive import DerivedSeries, compute_derived_series
from .ingest import AnnualRecord, Dataset, FirmPanel, PriceSeries, load_panel, load_prices, parse_panel_csv
from .pipeline import FirmAnalysis, analyze_dataset, analyze_panel
from .report import ReportBundle, build_bundle, render_regression_table, render_report
from .synth import GeneratorSpec, generate_csv, generate_panel
from .theorylab import Status, Theory, classify_firm, test_hypotheses

__version__ = "0.1.0"


def fixture_path(name: str):
    """Path of a bundled sample file, e.g. ``fixture_path("demo_bank.csv")``."""
    from importlib.resources import files

    return files("capstruct") / "fixtures" / name
