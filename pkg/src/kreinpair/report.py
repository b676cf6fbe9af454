"""Small containers for check results that serialize to JSON."""

from dataclasses import dataclass, field
from typing import Any

import numpy as np


def _jsonable(value):
    if isinstance(value, (np.floating, float)):
        v = float(value)
        return v if np.isfinite(v) else str(v)
    if isinstance(value, (np.integer,)):
        return int(value)
    if isinstance(value, (np.bool_,)):
        return bool(value)
    if isinstance(value, (complex, np.complexfloating)):
        return {"re": _jsonable(value.real), "im": _jsonable(value.imag)}
    if isinstance(value, np.ndarray):
        return [_jsonable(v) for v in value.tolist()]
    if isinstance(value, dict):
        return {str(k): _jsonable(v) for k, v in value.items()}
    if isinstance(value, (list, tuple)):
        return [_jsonable(v) for v in value]
    if hasattr(value, "to_dict"):
        return value.to_dict()
    return value


@dataclass
class Check:
    name: str
    value: float
    limit: float
    passed: bool
    detail: str = ""

    @classmethod
    def at_most(cls, name, value, limit, detail=""):
        value = float(value)
        return cls(name, value, float(limit), bool(value <= limit), detail)

    @classmethod
    def at_least(cls, name, value, limit, detail=""):
        value = float(value)
        return cls(name, value, float(limit), bool(value >= limit), detail)

    @classmethod
    def flag(cls, name, ok, detail=""):
        return cls(name, 0.0 if ok else 1.0, 0.0, bool(ok), detail)

    def to_dict(self):
        return _jsonable(
            {"name": self.name, "value": self.value, "limit": self.limit, "passed": self.passed, "detail": self.detail}
        )


@dataclass
class Report:
    title: str
    checks: list = field(default_factory=list)
    data: dict = field(default_factory=dict)

    @property
    def passed(self) -> bool:
        return all(c.passed for c in self.checks)

    def add(self, check: Check) -> Check:
        self.checks.append(check)
        return check

    def extend(self, other: "Report", prefix: str = ""):
        for c in other.checks:
            self.checks.append(Check(prefix + c.name, c.value, c.limit, c.passed, c.detail))

    def failures(self):
        return [c for c in self.checks if not c.passed]

    def to_dict(self) -> dict[str, Any]:
        return {
            "title": self.title,
            "passed": self.passed,
            "checks": [c.to_dict() for c in self.checks],
            "data": _jsonable(self.data),
        }
