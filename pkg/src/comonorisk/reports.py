"""Check reports shared by the verification routines."""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass, field
from typing import Any

import numpy as np

from .comonotone import ScenarioTable
from .distributions import DiscretePosition


def jsonable(obj: Any) -> Any:
    """Convert kernel objects and numpy scalars into plain JSON values."""
    if isinstance(obj, (DiscretePosition, ScenarioTable)):
        return obj.to_dict()
    if hasattr(obj, "to_spec"):
        return jsonable(obj.to_spec())
    if hasattr(obj, "to_dict") and not isinstance(obj, dict):
        return jsonable(obj.to_dict())
    if isinstance(obj, enum.Enum):
        return jsonable(obj.value)
    if isinstance(obj, dict):
        return {str(k): jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [jsonable(v) for v in obj]
    if isinstance(obj, np.ndarray):
        return [jsonable(v) for v in obj.tolist()]
    if isinstance(obj, (np.bool_, bool)):
        return bool(obj)
    if isinstance(obj, (np.integer,)):
        return int(obj)
    if isinstance(obj, (np.floating, float)):
        f = float(obj)
        if math.isnan(f):
            return "nan"
        if math.isinf(f):
            return "inf" if f > 0 else "-inf"
        return f
    return obj


@dataclass(frozen=True)
class CheckReport:
    """Outcome of one verification claim.

    ``expect`` is ``"pass"`` when the claim should hold on every tested
    instance and ``"witness"`` when a counterexample should be found.
    ``passed`` records whether the property held everywhere tested.
    """

    claim: str
    passed: bool
    expect: str = "pass"
    tolerance: float | None = None
    checked: int = 0
    witness: dict | None = None
    details: dict = field(default_factory=dict)

    @property
    def ok(self) -> bool:
        """True when the observed outcome matches the expectation."""
        if self.expect == "pass":
            return self.passed
        return (not self.passed) and self.witness is not None

    @property
    def status(self) -> str:
        if self.expect == "pass":
            return "pass" if self.passed else "fail"
        return "witness" if self.ok else "no-witness"

    def to_dict(self) -> dict:
        d = {
            "claim": self.claim,
            "status": self.status,
            "expect": self.expect,
            "ok": self.ok,
            "checked": self.checked,
            "tolerance": self.tolerance,
        }
        if self.witness is not None:
            d["witness"] = jsonable(self.witness)
        if self.details:
            d["details"] = jsonable(self.details)
        return d

    def __bool__(self) -> bool:
        return self.passed
