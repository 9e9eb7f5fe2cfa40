"""Verification reports: seeded Monte-Carlo outcomes with stable serialization.

Reports are plain data.  JSON output is key-sorted so that identical runs are
byte-identical except for the wall_time_ms field; CSV output is a flat two-line
summary of the scalar fields.
"""

from __future__ import annotations

import dataclasses
import io
import json
import numbers

import numpy as np


def vector_wire(v) -> list:
    """Vector as a row of [re, im] pairs."""
    v = np.atleast_1d(np.asarray(v))
    return [[float(np.real(x)), float(np.imag(x))] for x in v]


def matrix_wire(m) -> dict:
    """Matrix as row-major [re, im] pairs with explicit shape."""
    m = np.asarray(m)
    return {
        "rows": int(m.shape[0]),
        "cols": int(m.shape[1]),
        "data": [[float(np.real(x)), float(np.imag(x))] for x in m.ravel()],
    }


def _plain(value):
    if isinstance(value, np.ndarray):
        return vector_wire(value) if value.ndim == 1 else matrix_wire(value)
    if isinstance(value, (np.floating, np.integer)):
        return value.item()
    if isinstance(value, dict):
        return {k: _plain(v) for k, v in value.items()}
    if isinstance(value, (list, tuple)):
        return [_plain(v) for v in value]
    return value


@dataclasses.dataclass
class VerificationReport:
    command: str
    group: dict | None
    omega: dict | None
    seed: int
    samples_requested: int
    samples_completed: int
    samples_indeterminate: int
    violations: int
    min_margin: float | None
    worst_witness: dict | None
    wall_time_ms: int
    tolerance_set: dict
    extras: dict = dataclasses.field(default_factory=dict)

    def __post_init__(self):
        if self.samples_completed + self.samples_indeterminate != self.samples_requested:
            raise ValueError("completed + indeterminate must equal requested")
        if self.violations > self.samples_completed:
            raise ValueError("violations cannot exceed completed samples")

    @property
    def exit_code(self) -> int:
        if self.violations > 0:
            return 2
        if self.samples_indeterminate > 0:
            return 3
        return 0

    def as_dict(self) -> dict:
        out = dataclasses.asdict(self)
        return _plain(out)

    def to_json(self) -> str:
        return json.dumps(self.as_dict(), sort_keys=True, indent=2) + "\n"

    def to_csv(self) -> str:
        row = {
            "command": self.command,
            "group": "" if self.group is None else f"{self.group['family']}:{self.group['n']}",
            "omega": "" if self.omega is None else
                     f"{self.omega['shape']}:{self.omega['scale'] if self.omega['shape'] == 'scale' else self.omega['radius']}",
            "seed": self.seed,
            "samples_requested": self.samples_requested,
            "samples_completed": self.samples_completed,
            "samples_indeterminate": self.samples_indeterminate,
            "violations": self.violations,
            "min_margin": "" if self.min_margin is None else repr(float(self.min_margin)),
            "wall_time_ms": self.wall_time_ms,
        }
        for name in sorted(self.tolerance_set):
            row[f"tol.{name}"] = repr(float(self.tolerance_set[name]))
        for name in sorted(self.extras):
            value = self.extras[name]
            if isinstance(value, numbers.Number):
                row[f"extra.{name}"] = repr(float(value))
        buf = io.StringIO()
        buf.write(",".join(row.keys()) + "\n")
        buf.write(",".join(str(v) for v in row.values()) + "\n")
        return buf.getvalue()

    def render(self, fmt: str = "json") -> str:
        if fmt == "json":
            return self.to_json()
        if fmt == "csv":
            return self.to_csv()
        raise ValueError(f"unknown report format {fmt!r}")
