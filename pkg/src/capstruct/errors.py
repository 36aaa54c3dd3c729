"""Exception types raised across the package."""

from __future__ import annotations


class CapStructError(Exception):
    """Base class for every error raised by capstruct."""


# ingest
class MissingColumn(CapStructError):
    def __init__(self, name: str):
        super().__init__(f"missing required column {name!r}")
        self.name = name


class MalformedNumber(CapStructError):
    def __init__(self, row: int, column: str, text: str = ""):
        super().__init__(f"row {row}, column {column!r}: cannot parse {text!r} as a number")
        self.row = row
        self.column = column
        self.text = text


class DuplicateYear(CapStructError):
    def __init__(self, year: int):
        super().__init__(f"fiscal year {year} appears more than once")
        self.year = year


class InvalidRecord(CapStructError):
    pass


# derive
class SeriesTooShort(CapStructError):
    pass


class PanelTooShort(CapStructError):
    pass


# stats
class EmptySeries(CapStructError):
    pass


class RankDeficient(CapStructError):
    pass


class TooFewObservations(CapStructError):
    pass


class InvalidDf(CapStructError):
    pass


class GroupTooSmall(CapStructError):
    pass


class TooFewPairs(CapStructError):
    pass


class ZeroVariance(CapStructError):
    pass


# theorylab
class NoUsableYears(CapStructError):
    pass


class AllMissingMVF(CapStructError):
    pass


class MissingEvidence(CapStructError):
    pass


# benchmarks
class WindowTooLarge(CapStructError):
    pass


# synth
class InvalidSpec(CapStructError):
    pass


# report
class UnsupportedFormat(CapStructError):
    pass
