"""Run reports: one record per CLI invocation, emitted as text or JSON.

JSON output is canonical (sorted keys, fixed separators), so two runs with
the same arguments and cache differ at most in the ``timings`` field.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from typing import IO

STATUSES = ("pass", "fail", "unsat", "error")

REPORT_SCHEMA = {
    "$schema": "https://json-schema.org/draft/2020-12/schema",
    "title": "RunReport",
    "type": "object",
    "required": ["command", "config", "status", "payload", "timings"],
    "additionalProperties": False,
    "properties": {
        "command": {"type": "string"},
        "config": {
            "type": "object",
            "required": ["p", "n", "degree_cap", "threads"],
            "properties": {
                "p": {"type": ["integer", "null"]},
                "n": {"type": ["integer", "null"]},
                "degree_cap": {"type": ["integer", "null"]},
                "threads": {"type": ["integer", "null"]},
                "cache_dir": {"type": ["string", "null"]},
            },
        },
        "status": {"enum": list(STATUSES)},
        "payload": {"type": "object"},
        "timings": {
            "type": "object",
            "additionalProperties": {"type": "integer", "minimum": 0},
        },
        "error": {"type": "string"},
    },
}


@dataclass
class RunReport:
    command: str
    config: dict
    status: str
    payload: dict = field(default_factory=dict)
    timings: dict = field(default_factory=dict)
    error: str | None = None

    def __post_init__(self):
        if self.status not in STATUSES:
            raise ValueError(f"unknown status {self.status!r}")

    @property
    def exit_code(self) -> int:
        return {"pass": 0, "fail": 1, "unsat": 1, "error": 2}[self.status]

    def to_json(self) -> dict:
        out = {"command": self.command, "config": self.config, "status": self.status,
               "payload": self.payload, "timings": self.timings}
        if self.error is not None:
            out["error"] = self.error
        return out

    def dumps(self) -> str:
        return json.dumps(self.to_json(), sort_keys=True, separators=(",", ":"))


def strip_timings(doc: dict) -> dict:
    """Copy of a report document without the timings field."""
    return {k: v for k, v in doc.items() if k != "timings"}


def _scalar(v) -> str:
    if isinstance(v, bool):
        return "yes" if v else "no"
    if v is None:
        return "-"
    return str(v)


def _flatten(row: dict, prefix: str = "") -> dict:
    out = {}
    for k, v in row.items():
        if isinstance(v, dict):
            out.update(_flatten(v, f"{prefix}{k}."))
        elif isinstance(v, list) and any(isinstance(x, (dict, list)) for x in v):
            continue
        elif isinstance(v, list):
            out[prefix + k] = "(" + ",".join(_scalar(x) for x in v) + ")"
        else:
            out[prefix + k] = _scalar(v)
    return out


def _table(rows: list[dict]) -> list[str]:
    flat = [_flatten(r) for r in rows]
    cols: list[str] = []
    for r in flat:
        cols.extend(k for k in r if k not in cols)
    cells = [[r.get(c, "") for c in cols] for r in flat]
    widths = [max(len(c), *(len(row[i]) for row in cells)) for i, c in enumerate(cols)]
    lines = ["  ".join(c.rjust(w) for c, w in zip(cols, widths))]
    lines += ["  ".join(x.rjust(w) for x, w in zip(row, widths)) for row in cells]
    return lines


def _render(key: str, value, indent: int, out: list[str]):
    pad = " " * indent
    if isinstance(value, dict):
        out.append(f"{pad}{key}:")
        for k, v in value.items():
            _render(k, v, indent + 2, out)
    elif isinstance(value, list) and value and all(isinstance(r, dict) for r in value):
        out.append(f"{pad}{key}:")
        out.extend(pad + "  " + line for line in _table(value))
    elif isinstance(value, list):
        out.append(f"{pad}{key}: [{', '.join(_scalar(v) for v in value)}]")
    else:
        out.append(f"{pad}{key}: {_scalar(value)}")


def render_text(report: RunReport) -> str:
    head = f"{report.status.upper()}  {report.command}"
    cfg = report.config
    head += f"  (p={cfg.get('p')}, n={cfg.get('n')})"
    lines = [head]
    if report.error:
        lines.append(f"error: {report.error}")
    for k, v in report.payload.items():
        _render(k, v, 0, lines)
    if report.timings:
        lines.append("timings (ms): " + ", ".join(f"{k}={v}" for k, v in report.timings.items()))
    return "\n".join(lines)


def report_emit(report: RunReport, fmt: str, stream: IO[str]) -> None:
    if fmt == "json":
        stream.write(report.dumps() + "\n")
    elif fmt == "text":
        stream.write(render_text(report) + "\n")
    else:
        raise ValueError(f"unknown format {fmt!r}")
