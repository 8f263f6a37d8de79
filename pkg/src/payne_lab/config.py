"""Run configuration for the command-line driver."""
from __future__ import annotations

import os
from dataclasses import dataclass, field
from pathlib import Path
from typing import Literal

from .errors import InputError

Command = Literal["strip", "eig", "verify", "sweep", "crossing"]
OutputFormat = Literal["json", "csv"]

TOLERANCE_ENV = "PAYNE_LAB_TOL"
# keys accepted in the override map and their defaults
TOLERANCE_DEFAULTS = {
    "eigen_tol": 1e-10,     # eigensolver residual tolerance
    "root_tol": 1e-12,      # strip-mode bisection width
    "crossing_tol": 1e-20,  # brentq xtol for the bound-curve crossing
}


def parse_tolerances(text: str | None) -> dict[str, float]:
    """``"key=value,key=value"`` into a float map restricted to known keys."""
    out: dict[str, float] = {}
    if not text:
        return out
    for item in text.split(","):
        item = item.strip()
        if not item:
            continue
        key, sep, val = item.partition("=")
        key = key.strip()
        if not sep or key not in TOLERANCE_DEFAULTS:
            raise InputError(f"bad tolerance override {item!r}; "
                             f"known keys: {', '.join(sorted(TOLERANCE_DEFAULTS))}")
        try:
            v = float(val)
        except ValueError:
            raise InputError(f"tolerance {key} is not a number: {val!r}") from None
        if not v > 0:
            raise InputError(f"tolerance {key} must be positive")
        out[key] = v
    return out


@dataclass(frozen=True)
class RunConfig:
    command: Command
    polygon_path: Path | None = None
    grid_h: float | None = None
    levels: int | None = None
    output_format: OutputFormat = "json"
    tolerance_overrides: dict[str, float] = field(default_factory=dict)

    def __post_init__(self):
        if self.command in ("eig", "verify") and self.polygon_path is None:
            raise InputError(f"{self.command} needs a polygon file")
        if self.levels is not None and self.levels < 3:
            raise InputError("levels must be >= 3")
        if self.grid_h is not None and not self.grid_h > 0:
            raise InputError("grid_h must be positive")
        if self.output_format not in ("json", "csv"):
            raise InputError(f"unknown output format {self.output_format!r}")

    def tol(self, key: str) -> float:
        return self.tolerance_overrides.get(key, TOLERANCE_DEFAULTS[key])

    @classmethod
    def with_env(cls, **kw) -> "RunConfig":
        """Merge overrides from the environment under explicit ones."""
        merged = parse_tolerances(os.environ.get(TOLERANCE_ENV))
        merged.update(kw.pop("tolerance_overrides", None) or {})
        return cls(tolerance_overrides=merged, **kw)
