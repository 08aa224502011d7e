"""Pass/fail reports for machine-verified identities."""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Any


@dataclass
class CheckReport:
    """Outcome of one exact identity check.

    ``lhs`` and ``rhs`` are JSON-ready renderings of both sides; a failing
    report is a result, not an error.
    """

    claim: str
    passed: bool
    lhs: Any = None
    rhs: Any = None
    witness: Any = None

    def to_json(self) -> dict:
        out = {"claim": self.claim, "lhs": self.lhs, "rhs": self.rhs,
               "pass": self.passed}
        if self.witness is not None:
            out["witness"] = self.witness
        return out


@dataclass
class SuiteReport:
    """A batch of checks with a shared configuration echo."""

    suite: str
    config: dict
    results: list = field(default_factory=list)

    @property
    def passed(self) -> bool:
        return all(r.passed for r in self.results)

    def to_json(self) -> dict:
        return {"suite": self.suite, "config": self.config,
                "results": [r.to_json() for r in self.results],
                "pass": self.passed}
