"""Verification reports: per-check pass/fail with the worst violation seen."""
from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from typing import Any

import numpy as np

from .lattice import GridConfig, LatticeElement


def to_jsonable(obj: Any) -> Any:
    """Convert lattice elements, numpy values and complex numbers for JSON."""
    if isinstance(obj, LatticeElement):
        return {"field": obj.field.value, "coords": obj.to_pairs()}
    if isinstance(obj, dict):
        return {str(k): to_jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [to_jsonable(v) for v in obj]
    if isinstance(obj, np.ndarray):
        return to_jsonable(obj.tolist())
    if isinstance(obj, (bool, np.bool_)):
        return bool(obj)
    if isinstance(obj, (int, np.integer)):
        return int(obj)
    if isinstance(obj, (complex, np.complexfloating)):
        return [_finite(obj.real), _finite(obj.imag)]
    if isinstance(obj, (float, np.floating)):
        return _finite(obj)
    return obj


def _finite(x) -> float | str:
    x = float(x)
    if math.isfinite(x):
        return x
    return "nan" if math.isnan(x) else ("inf" if x > 0 else "-inf")


def grid_diagnostics(cfg: GridConfig, residuals: list[float] | None = None) -> dict:
    return {
        "theta_points": cfg.theta_points,
        "lambda_points": cfg.lambda_points,
        "refine_iters": cfg.refine_iters,
        "residuals": [float(r) for r in (residuals or [])],
    }


def _summarize(diag: dict) -> dict:
    out = dict(diag)
    res = out.get("residuals")
    if isinstance(res, list):
        out["residuals"] = {
            "count": len(res),
            "max": max(res, default=0.0),
            "mean": (sum(res) / len(res)) if res else 0.0,
        }
    return out


@dataclass
class VerificationReport:
    suite: str
    instances: int = 0
    passes: int = 0
    max_violation: float = 0.0
    worst_witness: Any = None
    grid_diagnostics: dict = field(default_factory=dict)
    seed: int | None = None
    details: dict = field(default_factory=dict)
    subreports: list["VerificationReport"] = field(default_factory=list)

    @property
    def passed(self) -> bool:
        return self.passes == self.instances and all(r.passed for r in self.subreports)

    def record(self, ok: bool, violation: float, witness: Any = None) -> None:
        """Account for one checked instance.

        The witness is kept for the largest violation; failing instances
        take precedence over passing ones.
        """
        violation = max(float(violation), 0.0)
        first_failure = not ok and self.passes == self.instances
        self.instances += 1
        if ok:
            self.passes += 1
        all_passing = self.passes == self.instances
        if (
            first_failure
            or self.worst_witness is None
            or (violation > self.max_violation and (not ok or all_passing))
        ):
            self.worst_witness = witness
        self.max_violation = max(self.max_violation, violation)

    def add_residual(self, value: float) -> None:
        self.grid_diagnostics.setdefault("residuals", []).append(float(value))

    def to_dict(self) -> dict:
        out = {
            "suite": self.suite,
            "instances": self.instances,
            "passes": self.passes,
            "passed": self.passed,
            "max_violation": self.max_violation,
            "worst_witness": self.worst_witness,
            "grid_diagnostics": _summarize(self.grid_diagnostics),
            "seed": self.seed,
            "details": self.details,
        }
        if self.subreports:
            out["subreports"] = [r.to_dict() for r in self.subreports]
        return to_jsonable(out)

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), sort_keys=True, indent=2) + "\n"

    def to_text(self) -> str:
        lines = [self._line()]
        for sub in self.subreports:
            lines.append("  " + sub._line())
        return "\n".join(lines) + "\n"

    def _line(self) -> str:
        status = "PASS" if self.passed else "FAIL"
        return (
            f"[{status}] {self.suite}: {self.passes}/{self.instances} passed, "
            f"max violation {self.max_violation:.3e}"
        )
