"""Sweep configuration: a flat ``key = value`` text format with strict validation.

Blank lines and ``#`` comments are ignored.  Lists are comma separated::

    quad_catalog_id = cosine
    alpha = 1
    H_values = 4, 8, 16
    M = 3.3
    outputs = H, g2h_lower, ext_fd, g1h_upper
"""

from __future__ import annotations

import math
import os
from dataclasses import dataclass, field

from .errors import DomainError
from .modulus_fd.geometry import CATALOG

__all__ = ["SweepConfig", "ConfigError", "parse_config", "COLUMNS"]

# column vocabulary, in default output order
COLUMNS = (
    "H",
    "ext_analytic_rect",
    "g2h_lower",
    "g1h_upper",
    "ext_fd",
    "interior_fd",
    "asymptote",
    "ext_rect_ratio",
    "g2h_ratio",
    "ext_fd_ratio",
    "g1h_ratio",
    "g2h_residual",
    "ext_fd_err",
    "interior_fd_err",
    "error",
)


class ConfigError(DomainError):
    """Malformed or invalid sweep configuration."""


@dataclass(frozen=True)
class SweepConfig:
    quad_catalog_id: str
    H_values: tuple[float, ...]
    alpha: float = 1.0
    quad_height: float = 1.0
    M: float | None = None
    fd_tolerance: float = 1e-2
    grid_budget: int = 4_000_000
    outputs: tuple[str, ...] = field(default=COLUMNS)

    def __post_init__(self):
        if self.quad_catalog_id not in CATALOG:
            raise ConfigError(f"quad_catalog_id: unknown quad {self.quad_catalog_id!r}; catalog: {', '.join(sorted(CATALOG))}")
        for name in ("alpha", "quad_height", "fd_tolerance"):
            v = getattr(self, name)
            if not (v > 0 and math.isfinite(v)):
                raise ConfigError(f"{name}: must be positive and finite, got {v!r}")
        if self.M is not None and not (self.M > 0 and math.isfinite(self.M)):
            raise ConfigError(f"M: must be positive and finite, got {self.M!r}")
        if not self.H_values:
            raise ConfigError("H_values: at least one value is required")
        if any(not (h > 0 and math.isfinite(h)) for h in self.H_values):
            raise ConfigError("H_values: all values must be positive and finite")
        if any(b <= a for a, b in zip(self.H_values[:-1], self.H_values[1:])):
            raise ConfigError("H_values: must be strictly increasing")
        if self.grid_budget < 10_000:
            raise ConfigError(f"grid_budget: must be at least 10000, got {self.grid_budget!r}")
        unknown = [c for c in self.outputs if c not in COLUMNS]
        if unknown:
            raise ConfigError(f"outputs: unknown columns {unknown}; vocabulary: {', '.join(COLUMNS)}")
        if len(set(self.outputs)) != len(self.outputs):
            raise ConfigError("outputs: duplicate columns")


def _float(s):
    return float(s)


def _int(s):
    v = float(s)
    if v != int(v):
        raise ValueError(f"not an integer: {s!r}")
    return int(v)


def _floats(s):
    return tuple(float(x) for x in s.split(",") if x.strip())


def _names(s):
    return tuple(x.strip() for x in s.split(",") if x.strip())


_KEYS = {
    "quad_catalog_id": str,
    "alpha": _float,
    "quad_height": _float,
    "H_values": _floats,
    "M": _float,
    "fd_tolerance": _float,
    "grid_budget": _int,
    "outputs": _names,
}


def parse_config(source: str | os.PathLike) -> SweepConfig:
    """Parse a config file path, or inline text if ``source`` contains a newline or ``=``."""
    text = str(source)
    if isinstance(source, os.PathLike) or ("\n" not in text and "=" not in text):
        with open(source, encoding="utf-8") as fh:
            text = fh.read()
    values = {}
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0]
        if not line.strip():
            continue
        if "=" not in line:
            col = len(line) - len(line.lstrip()) + 1
            raise ConfigError(f"line {lineno}, column {col}: expected 'key = value'")
        key_part, val_part = line.split("=", 1)
        key = key_part.strip()
        col = len(key_part) - len(key_part.lstrip()) + 1
        if key not in _KEYS:
            raise ConfigError(f"line {lineno}, column {col}: unknown key {key!r}; known keys: {', '.join(_KEYS)}")
        if key in values:
            raise ConfigError(f"line {lineno}, column {col}: duplicate key {key!r}")
        val = val_part.strip()
        try:
            values[key] = _KEYS[key](val)
        except ValueError as exc:
            vcol = len(key_part) + 2 + len(val_part) - len(val_part.lstrip())
            raise ConfigError(f"line {lineno}, column {vcol}: bad value for {key}: {exc}") from None
    for required in ("quad_catalog_id", "H_values"):
        if required not in values:
            raise ConfigError(f"{required}: missing required key")
    return SweepConfig(**values)
