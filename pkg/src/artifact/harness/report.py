from __future__ import annotations

import json
from dataclasses import dataclass, field

import jsonschema

SCHEMA_VERSION = "v1"

_counts = {
    "type": "object",
    "required": ["total", "passed", "failed", "errors"],
    "properties": {k: {"type": "integer", "minimum": 0} for k in ("total", "passed", "failed", "errors")},
}

REPORT_SCHEMA = {
    "$schema": "https://json-schema.org/draft/2020-12/schema",
    "type": "object",
    "required": ["schema", "config", "cases", "summary"],
    "properties": {
        "schema": {"const": SCHEMA_VERSION},
        "config": {
            "type": "object",
            "required": ["p", "N", "n", "datum", "trials", "seed", "suites"],
        },
        "cases": {
            "type": "array",
            "items": {
                "type": "object",
                "required": ["index", "suite", "verdict", "inputs", "result", "runtime"],
                "properties": {
                    "index": {"type": "integer", "minimum": 0},
                    "suite": {"type": "string"},
                    "verdict": {"enum": ["pass", "fail", "error"]},
                    "inputs": {"type": "object"},
                    "result": {"type": "object"},
                    "error": {"type": ["string", "null"]},
                    "runtime": {"type": "number", "minimum": 0},
                },
            },
        },
        "summary": {
            "allOf": [_counts],
            "properties": {
                "runtime": {"type": "number"},
                "by_suite": {"type": "object", "additionalProperties": _counts},
            },
        },
    },
}


def _tally(cases) -> dict:
    out = {"total": len(cases), "passed": 0, "failed": 0, "errors": 0}
    for c in cases:
        out[{"pass": "passed", "fail": "failed", "error": "errors"}[c["verdict"]]] += 1
    return out


@dataclass
class Report:
    config: dict
    cases: list[dict] = field(default_factory=list)
    runtime: float = 0.0

    @property
    def ok(self) -> bool:
        return all(c["verdict"] == "pass" for c in self.cases)

    def summary(self) -> dict:
        s = _tally(self.cases)
        s["runtime"] = round(self.runtime, 3)
        suites = sorted({c["suite"] for c in self.cases})
        s["by_suite"] = {name: _tally([c for c in self.cases if c["suite"] == name]) for name in suites}
        return s

    def extend(self, other: Report) -> Report:
        self.cases.extend(other.cases)
        self.runtime += other.runtime
        return self

    def to_json(self) -> dict:
        cases = sorted(self.cases, key=lambda c: (c["suite"], c["index"]))
        return {"schema": SCHEMA_VERSION, "config": self.config, "cases": cases, "summary": self.summary()}

    def dumps(self, **kw) -> str:
        return json.dumps(self.to_json(), **kw)


def validate_report(d: dict) -> None:
    jsonschema.validate(d, REPORT_SCHEMA)


def strip_timing(d: dict) -> dict:
    d = json.loads(json.dumps(d))
    for c in d["cases"]:
        c.pop("runtime", None)
    d["summary"].pop("runtime", None)
    return d
