"""Check records and JSON reports."""

from __future__ import annotations

import json
import time
from dataclasses import dataclass, field
from typing import Any, Optional

from .exact import fmt_scalar

REPORT_VERSION = "1.0"


def _plain(v: Any) -> Any:
    if isinstance(v, dict):
        return {str(k): _plain(x) for k, x in v.items()}
    if isinstance(v, (list, tuple)):
        return [_plain(x) for x in v]
    if isinstance(v, (bool, int, str)) or v is None:
        return v
    return fmt_scalar(v)


@dataclass
class Check:
    """One verified property: passed unless a witness was recorded."""

    name: str
    anchor: str
    params: dict = field(default_factory=dict)
    trials: int = 0
    passed: bool = True
    witness: Optional[dict] = None
    notes: str = ""
    # "verdict" checks decide the exit code; "probe" checks only record a discrepancy
    role: str = "verdict"

    def fail(self, **witness) -> "Check":
        if self.passed:
            self.passed = False
            self.witness = witness
        return self

    def absorb(self, other: "Check") -> "Check":
        self.trials += other.trials
        if not other.passed:
            self.fail(sub_check=other.name, **(other.witness or {}))
        return self

    def to_dict(self) -> dict:
        d = {
            "name": self.name,
            "anchor": self.anchor,
            "params": _plain(self.params),
            "trials": self.trials,
            "passed": self.passed,
        }
        if self.witness is not None:
            d["witness"] = _plain(self.witness)
        if self.notes:
            d["notes"] = self.notes
        if self.role != "verdict":
            d["role"] = self.role
        return d


@dataclass
class Report:
    command: list
    config: dict
    checks: list = field(default_factory=list)
    started: float = field(default_factory=time.perf_counter)

    def add(self, check: Check) -> Check:
        self.checks.append(check)
        return check

    def extend(self, checks) -> None:
        for c in checks:
            self.add(c)

    @property
    def verdicts(self) -> list:
        return [c for c in self.checks if c.role == "verdict"]

    @property
    def passed(self) -> bool:
        return all(c.passed for c in self.verdicts)

    def summary(self) -> dict:
        verdicts = self.verdicts
        failed = [c.name for c in verdicts if not c.passed]
        probes = [c for c in self.checks if c.role != "verdict"]
        return {
            "total": len(verdicts),
            "passed": len(verdicts) - len(failed),
            "failed": len(failed),
            "failed_names": failed,
            "probes": len(probes),
            "discrepancies": [c.name for c in probes if not c.passed],
            "wall_time_s": round(time.perf_counter() - self.started, 3),
        }

    def to_dict(self) -> dict:
        return {
            "version": REPORT_VERSION,
            "command": self.command,
            "config": _plain(self.config),
            "checks": [c.to_dict() for c in self.checks],
            "summary": self.summary(),
        }

    def to_json(self, indent: int = 2) -> str:
        return json.dumps(self.to_dict(), indent=indent)


def all_passed(checks) -> bool:
    return all(c.passed for c in checks if c.role == "verdict")
