"""Uniform pass/fail blocks produced by every verification routine."""
from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np


def _plain(x):
    """Convert numpy scalars/arrays and complex numbers to JSON-friendly values."""
    if isinstance(x, dict):
        return {str(k): _plain(v) for k, v in x.items()}
    if isinstance(x, (list, tuple)):
        return [_plain(v) for v in x]
    if isinstance(x, np.ndarray):
        return _plain(x.tolist())
    if isinstance(x, (complex, np.complexfloating)):
        return {"re": float(x.real), "im": float(x.imag)}
    if isinstance(x, np.integer):
        return int(x)
    if isinstance(x, np.floating):
        return float(x)
    if isinstance(x, np.bool_):
        return bool(x)
    return x


@dataclass
class CheckReport:
    """One verification block.

    ``status`` is derived: ``"fail"`` iff some residual exceeds its threshold
    or an explicit failure was recorded, ``"skip"`` if marked so.
    """

    name: str
    residuals: dict = field(default_factory=dict)
    thresholds: dict = field(default_factory=dict)
    certificates: dict = field(default_factory=dict)
    notes: list = field(default_factory=list)
    failures: list = field(default_factory=list)
    skipped: bool = False

    def add(self, key: str, value: float, threshold: float) -> None:
        """Record a residual; per key the entry closest to (or furthest past) its threshold wins."""
        value, threshold = float(value), float(threshold)
        if key in self.residuals and not self._ratio(value, threshold) > self._ratio(
                self.residuals[key], self.thresholds[key]):
            return
        self.residuals[key] = value
        self.thresholds[key] = threshold

    @staticmethod
    def _ratio(value: float, threshold: float) -> float:
        if value != value:  # NaN always counts as a violation
            return float("inf")
        return value / threshold if threshold > 0 else (float("inf") if value > 0 else 0.0)

    def fail(self, message: str) -> None:
        self.failures.append(message)

    @property
    def status(self) -> str:
        if self.skipped:
            return "skip"
        if self.failures:
            return "fail"
        bad = [k for k, v in self.residuals.items() if not v <= self.thresholds[k]]
        return "fail" if bad else "pass"

    @property
    def passed(self) -> bool:
        return self.status != "fail"

    def violations(self) -> list[str]:
        out = [f"{k} = {v:.3e} > {self.thresholds[k]:.1e}"
               for k, v in sorted(self.residuals.items()) if not v <= self.thresholds[k]]
        return out + list(self.failures)

    def to_dict(self) -> dict:
        return _plain({
            "name": self.name,
            "status": self.status,
            "residuals": dict(sorted(self.residuals.items())),
            "thresholds": dict(sorted(self.thresholds.items())),
            "certificates": self.certificates,
            "notes": self.notes,
            "failures": self.failures,
        })
