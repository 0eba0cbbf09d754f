"""Pass/fail reports shared by the verification routines and the CLI."""

from __future__ import annotations

import json
from dataclasses import dataclass, field


@dataclass
class Check:
    name: str
    passed: bool
    detail: str = ""

    def to_json(self) -> dict:
        return {"name": self.name, "passed": self.passed, "detail": self.detail}


@dataclass
class Report:
    title: str
    graph: str = ""
    checks: list[Check] = field(default_factory=list)
    data: dict = field(default_factory=dict)

    def check(self, name: str, passed, detail: str = "") -> bool:
        passed = bool(passed)
        self.checks.append(Check(name, passed, detail))
        return passed

    def extend(self, other: Report, prefix: str = ""):
        for c in other.checks:
            self.checks.append(Check(prefix + c.name, c.passed, c.detail))
        for k, v in other.data.items():
            self.data[prefix + k] = v

    @property
    def passed(self) -> bool:
        return all(c.passed for c in self.checks)

    def failures(self) -> list[Check]:
        return [c for c in self.checks if not c.passed]

    def to_text(self) -> str:
        lines = [f"== {self.title} [{self.graph}]"]
        for k, v in self.data.items():
            lines.append(f"   {k}: {v}")
        for c in self.checks:
            mark = "PASS" if c.passed else "FAIL"
            tail = f"  ({c.detail})" if c.detail else ""
            lines.append(f"   {mark} {c.name}{tail}")
        return "\n".join(lines)

    def to_json(self) -> dict:
        return {
            "title": self.title,
            "graph": self.graph,
            "passed": self.passed,
            "data": {k: _jsonable(v) for k, v in self.data.items()},
            "checks": [c.to_json() for c in self.checks],
        }

    def to_json_text(self) -> str:
        return json.dumps(self.to_json(), sort_keys=True)


def _jsonable(v):
    if isinstance(v, (int, float, str, bool)) or v is None:
        return v
    if hasattr(v, "to_json"):
        return v.to_json()
    if isinstance(v, (list, tuple)):
        return [_jsonable(x) for x in v]
    return str(v)
