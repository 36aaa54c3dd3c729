"""Analysis settings and the key-value config file that overrides them.

The file holds one ``key = value`` pair per line; ``#`` and ``;`` start
comments. Recognised keys::

    followed_alpha  = 0.05   # p below this marks a verdict Followed
    partial_alpha   = 0.10   # p below this marks it PartiallyFollowed
    pecking_strict  = true   # RRE > RTD > REQ (false: >=)
    min_rows        = 6      # usable rows each hypothesis needs
    robust_pvalues  = false  # drive hypothesis p-values by HC1 SEs
    rsi_period      = 14
    ma_windows      = 50, 200
"""

from __future__ import annotations

import configparser
from dataclasses import dataclass, fields
from pathlib import Path

from .errors import CapStructError


class ConfigError(CapStructError):
    pass


@dataclass(frozen=True)
class Config:
    followed_alpha: float = 0.05
    partial_alpha: float = 0.10
    pecking_strict: bool = True
    min_rows: int = 6
    robust_pvalues: bool = False
    rsi_period: int = 14
    ma_windows: tuple[int, ...] = (50, 200)

    def __post_init__(self):
        if not 0 < self.followed_alpha <= self.partial_alpha < 1:
            raise ConfigError("need 0 < followed_alpha <= partial_alpha < 1")
        if self.min_rows < 3:
            raise ConfigError("min_rows must be at least 3")
        if self.rsi_period < 1 or any(w < 1 for w in self.ma_windows):
            raise ConfigError("rsi_period and ma_windows must be positive")


DEFAULT = Config()


def parse_config(text: str) -> Config:
    parser = configparser.ConfigParser(inline_comment_prefixes=("#", ";"))
    try:
        parser.read_string("[capstruct]\n" + text)
    except configparser.Error as exc:
        raise ConfigError(str(exc)) from None
    if parser.sections() != ["capstruct"]:
        raise ConfigError("section headers are not allowed; use plain key = value lines")
    section = parser["capstruct"]
    known = {f.name: f for f in fields(Config)}
    values = {}
    for key in section:
        if key not in known:
            raise ConfigError(f"unknown config key {key!r}")
        try:
            if key in ("pecking_strict", "robust_pvalues"):
                values[key] = section.getboolean(key)
            elif key in ("min_rows", "rsi_period"):
                values[key] = section.getint(key)
            elif key == "ma_windows":
                values[key] = tuple(int(v) for v in section[key].split(",") if v.strip())
            else:
                values[key] = section.getfloat(key)
        except ValueError:
            raise ConfigError(f"bad value for {key}: {section[key]!r}") from None
    return Config(**values)


def load_config(path: str | Path) -> Config:
    return parse_config(Path(path).read_text(encoding="utf-8"))
