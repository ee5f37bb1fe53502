"""Machine-readable reports: a small JSON document validated against a schema."""
from __future__ import annotations

import csv
import json
import math

import jsonschema

from . import __version__
from .symexpr import default_backend

CONVENTIONS = {
    "signature": "(-,+,+,+)",
    "riemann": "R^a_bcd = d_c Gamma^a_db - d_d Gamma^a_cb + Gamma^a_ce Gamma^e_db - Gamma^a_de Gamma^e_cb",
    "ricci": "R_bd = R^a_bad",
    "orientation": "eps_{t r theta} = +sqrt|det g|",
    "twist": "G = e^{3u} *_g F (unrescaled g) = e^{4u} *_{g~} F",
    "cross_term": "metric matrix stores g_{t phi}; line element coefficient is 2 g_{t phi}",
}

_ENTRY = {
    "type": "object",
    "required": ["name", "value", "tolerance", "passed"],
    "properties": {
        "name": {"type": "string"},
        "value": {"type": ["number", "string", "boolean", "null", "array"]},
        "tolerance": {"type": ["number", "null"]},
        "passed": {"type": ["boolean", "null"]},
        "note": {"type": "string"},
    },
    "additionalProperties": False,
    # a checked numeric value must say what it was checked against
    "if": {"properties": {"value": {"type": "number"}, "passed": {"type": "boolean"}}},
    "then": {"properties": {"tolerance": {"type": "number"}}},
}

SCHEMA = {
    "$schema": "https://json-schema.org/draft/2020-12/schema",
    "type": "object",
    "required": ["command", "inputs", "results", "tables", "provenance", "passed"],
    "properties": {
        "command": {"type": "string"},
        "inputs": {"type": "object"},
        "results": {"type": "array", "items": _ENTRY},
        "tables": {
            "type": "object",
            "additionalProperties": {
                "type": "object",
                "required": ["columns", "rows"],
                "properties": {
                    "columns": {"type": "array", "items": {"type": "string"}},
                    "rows": {"type": "array", "items": {"type": "array"}},
                },
            },
        },
        "provenance": {
            "type": "object",
            "required": ["tool", "version", "conventions"],
        },
        "passed": {"type": "boolean"},
    },
    "additionalProperties": False,
}


def _clean(x):
    if isinstance(x, float) and not math.isfinite(x):
        return None
    if hasattr(x, "item"):
        return _clean(x.item())
    if isinstance(x, (list, tuple)):
        return [_clean(v) for v in x]
    return x


class Report:
    def __init__(self, command: str, inputs: dict | None = None):
        self.command = command
        self.inputs = dict(inputs or {})
        self.results: list[dict] = []
        self.tables: dict = {}

    def add(self, name, value, tolerance=None, passed=None, note=None):
        entry = {"name": name, "value": _clean(value),
                 "tolerance": None if tolerance is None else float(tolerance),
                 "passed": None if passed is None else bool(passed)}
        if note:
            entry["note"] = note
        self.results.append(entry)
        return entry

    def check(self, name, value, tolerance, ok=None, note=None):
        """Record ``value`` and whether it meets ``tolerance`` (value <= tol
        unless ``ok`` is given explicitly)."""
        if ok is None:
            ok = value is not None and math.isfinite(value) and value <= tolerance
        return self.add(name, value, tolerance, ok, note)

    def table(self, name, columns, rows):
        self.tables[name] = {"columns": list(columns), "rows": [[_clean(v) for v in r] for r in rows]}

    @property
    def passed(self) -> bool:
        return all(r["passed"] is not False for r in self.results)

    def to_dict(self) -> dict:
        doc = {
            "command": self.command,
            "inputs": {k: _clean(v) for k, v in self.inputs.items()},
            "results": self.results,
            "tables": self.tables,
            "provenance": {"tool": "axired", "version": __version__, "backend": default_backend(),
                           "conventions": CONVENTIONS},
            "passed": self.passed,
        }
        validate(doc)
        return doc

    def dumps(self) -> str:
        return json.dumps(self.to_dict(), indent=2, sort_keys=False)

    def write(self, path):
        with open(path, "w", encoding="utf-8") as fh:
            fh.write(self.dumps() + "\n")

    def summary_lines(self):
        for r in self.results:
            flag = {True: "PASS", False: "FAIL", None: "INFO"}[r["passed"]]
            tol = "" if r["tolerance"] is None else f" (tol {r['tolerance']:g})"
            val = r["value"]
            if isinstance(val, float):
                val = f"{val:.6g}"
            yield f"{flag} {r['name']}: {val}{tol}"


def validate(doc: dict) -> None:
    jsonschema.validate(doc, SCHEMA)


def write_csv(path, columns, rows) -> None:
    with open(path, "w", newline="", encoding="utf-8") as fh:
        w = csv.writer(fh)
        w.writerow(columns)
        for r in rows:
            w.writerow([repr(float(v)) if isinstance(v, float) or hasattr(v, "item") else v for v in r])
