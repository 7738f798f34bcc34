"""Structured run reports: JSON documents and flat plot tables.

Floats are written with 12 significant digits; infinities and NaN become
the strings ``"inf"``, ``"-inf"`` and ``"nan"``, so every report is valid
JSON and byte-for-byte reproducible.
"""

from __future__ import annotations

import dataclasses
import json
import math
from dataclasses import dataclass, field

import numpy as np

SIG_DIGITS = 12


def fmt_float(x: float):
    x = float(x)
    if math.isnan(x):
        return "nan"
    if math.isinf(x):
        return "inf" if x > 0 else "-inf"
    return float(f"{x:.{SIG_DIGITS}g}")


def to_jsonable(obj):
    """Recursively convert results (dataclasses, arrays, numpy scalars)."""
    if obj is None or isinstance(obj, (str, bool)):
        return obj
    if isinstance(obj, np.bool_):
        return bool(obj)
    if isinstance(obj, (int, np.integer)):
        return int(obj)
    if isinstance(obj, (float, np.floating)):
        return fmt_float(obj)
    if isinstance(obj, np.ndarray):
        return to_jsonable(obj.tolist())
    if dataclasses.is_dataclass(obj) and not isinstance(obj, type):
        return {f.name: to_jsonable(getattr(obj, f.name)) for f in dataclasses.fields(obj) if f.repr}
    if isinstance(obj, dict):
        return {str(k): to_jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [to_jsonable(v) for v in obj]
    if callable(obj):
        return getattr(obj, "name", getattr(obj, "__name__", "callable"))
    raise TypeError(f"cannot serialize {type(obj).__name__}")


@dataclass
class Report:
    """Outcome of one command: results, pass/fail checks and provenance."""

    command: str
    config: dict
    results: dict
    checks: dict  # name -> bool; the run passes when all hold
    provenance: dict = field(default_factory=dict)
    timing: dict | None = None
    plot: tuple | None = None  # (header, rows) for tabular emission

    @property
    def passed(self) -> bool:
        return all(bool(v) for v in self.checks.values())

    def to_dict(self) -> dict:
        out = {
            "command": self.command,
            "config": to_jsonable(self.config),
            "passed": self.passed,
            "checks": to_jsonable(self.checks),
            "results": to_jsonable(self.results),
            "provenance": to_jsonable(self.provenance),
        }
        if self.timing is not None:
            out["timing"] = to_jsonable(self.timing)
        return out

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), indent=2, sort_keys=False) + "\n"

    def plot_text(self) -> str:
        if self.plot is None:
            return ""
        header, rows = self.plot
        lines = ["\t".join(header)]
        for row in rows:
            lines.append("\t".join(str(to_jsonable(v)) for v in row))
        return "\n".join(lines) + "\n"
