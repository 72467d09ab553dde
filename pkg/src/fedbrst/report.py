"""Check reports serialized as {check, status, witness}."""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from typing import Any

from .scalars import GaussQ, Series


def jsonable(x: Any):
    """Convert exact scalars and containers to deterministic JSON-friendly values."""
    if isinstance(x, GaussQ):
        return x.to_json() if x.im else str(x.re)
    if isinstance(x, Series):
        return x.to_json()
    if hasattr(x, "to_json") and callable(x.to_json):
        return x.to_json()
    if isinstance(x, dict):
        return {str(k): jsonable(v) for k, v in x.items()}
    if isinstance(x, (list, tuple)):
        return [jsonable(v) for v in x]
    if isinstance(x, (bool, int, str)) or x is None:
        return x
    return str(x)


@dataclass
class Report:
    check: str
    passed: bool
    witness: Any = None
    details: dict = field(default_factory=dict)

    @property
    def status(self) -> str:
        return "pass" if self.passed else "fail"

    def to_json(self) -> dict:
        out = {"check": self.check, "status": self.status, "witness": jsonable(self.witness)}
        if self.details:
            out["details"] = jsonable(self.details)
        return out

    def dumps(self) -> str:
        return json.dumps(self.to_json(), sort_keys=True)

    def __bool__(self):
        return self.passed
