"""Structured, reproducible run reports.

A report body contains the command, the full configuration echo, and
the per-case records sorted by a canonical case key; serialization is
deterministic (sorted keys, shortest round-trip floats), so two runs
with the same configuration and seed produce byte-identical bodies.
Wall-clock time and library versions live outside the body.
"""

from __future__ import annotations

import json
import sys
import time
from dataclasses import dataclass, field
from fractions import Fraction

import numpy as np

__all__ = ["RunConfig", "Report", "sanitize"]


def sanitize(value):
    """Make a value JSON-serializable and deterministic."""
    if isinstance(value, dict):
        return {str(k): sanitize(v) for k, v in value.items()}
    if isinstance(value, (list, tuple)):
        return [sanitize(v) for v in value]
    if isinstance(value, Fraction):
        return str(value)
    if isinstance(value, (np.floating,)):
        return float(value)
    if isinstance(value, (np.integer,)):
        return int(value)
    if isinstance(value, (np.bool_,)):
        return bool(value)
    if isinstance(value, np.ndarray):
        return sanitize(value.tolist())
    if isinstance(value, (str, int, float, bool)) or value is None:
        return value
    return str(value)


@dataclass(frozen=True)
class RunConfig:
    """Echo of everything needed to reproduce a run."""

    command: str
    params: dict
    seed: int
    out: str | None = None

    def as_dict(self) -> dict:
        return sanitize(
            {"command": self.command, "params": self.params, "seed": self.seed,
             "out": self.out}
        )


@dataclass
class Report:
    config: RunConfig
    records: list = field(default_factory=list)
    started: float = field(default_factory=time.monotonic)
    wallclock_s: float | None = None

    def add(self, case: str, *, passed: bool, tolerance, citation: str, **fields):
        record = {"case": case, "pass": bool(passed), "tolerance": tolerance,
                  "citation": citation}
        record.update(fields)
        self.records.append(sanitize(record))

    def add_record(self, record: dict):
        if "case" not in record or "pass" not in record:
            raise ValueError("records need 'case' and 'pass' fields")
        self.records.append(sanitize(record))

    def finish(self) -> "Report":
        self.wallclock_s = time.monotonic() - self.started
        self.records.sort(key=lambda r: str(r["case"]))
        return self

    @property
    def all_passed(self) -> bool:
        return all(r["pass"] for r in self.records)

    def body(self) -> dict:
        return {
            "command": self.config.command,
            "config": self.config.as_dict(),
            "records": self.records,
            "summary": {
                "cases": len(self.records),
                "passed": sum(1 for r in self.records if r["pass"]),
                "failed": sum(1 for r in self.records if not r["pass"]),
                "all_passed": self.all_passed,
            },
        }

    def body_text(self) -> str:
        return json.dumps(self.body(), sort_keys=True, indent=1)

    def full_text(self) -> str:
        payload = self.body()
        payload["wallclock_s"] = self.wallclock_s
        payload["versions"] = {
            "python": sys.version.split()[0],
            "numpy": np.__version__,
        }
        return json.dumps(payload, sort_keys=True, indent=1)

    def summary_lines(self) -> list[str]:
        lines = []
        for record in self.records:
            status = "PASS" if record["pass"] else "FAIL"
            lines.append(f"[{status}] {record['case']}")
        body = self.body()["summary"]
        lines.append(
            f"{body['passed']}/{body['cases']} passed"
            + ("" if body["all_passed"] else f", {body['failed']} FAILED")
        )
        return lines
