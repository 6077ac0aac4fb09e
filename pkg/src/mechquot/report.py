"""Verdict reports rendered as aligned text or as a JSON document.

Rendering is a pure function of the report contents, so identical inputs give
byte-identical output.  Nothing time- or host-dependent is recorded.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from typing import Any, List, Tuple

Row = Tuple[str, Any]


@dataclass
class Section:
    title: str
    rows: List[Row] = field(default_factory=list)

    def add(self, key: str, value: Any) -> "Section":
        self.rows.append((key, value))
        return self


@dataclass
class Report:
    command: str
    file: str
    options: List[Row] = field(default_factory=list)
    sections: List[Section] = field(default_factory=list)
    verdict: str = ""
    exit_code: int = 0
    message: str = ""

    def section(self, title: str) -> Section:
        s = Section(title)
        self.sections.append(s)
        return s


def _text_value(value: Any) -> str:
    if isinstance(value, bool):
        return "yes" if value else "no"
    if isinstance(value, float):
        return f"{value:.6e}"
    if value is None:
        return "-"
    if isinstance(value, (list, tuple)):
        return ", ".join(_text_value(v) for v in value) if value else "-"
    return str(value)


def _rows(rows: List[Row], indent: str = "  ") -> List[str]:
    if not rows:
        return []
    width = max(len(k) for k, _ in rows)
    out = []
    for k, v in rows:
        text = _text_value(v)
        lines = text.split("\n")
        out.append(f"{indent}{k.ljust(width)} : {lines[0]}")
        out.extend(f"{indent}{' ' * width}   {line}" for line in lines[1:])
    return out


def render_text(report: Report) -> str:
    lines = [f"mechquot {report.command} {report.file}"]
    lines += _rows(report.options)
    for s in report.sections:
        lines.append("")
        lines.append(f"[{s.title}]")
        lines += _rows(s.rows)
    lines.append("")
    if report.message:
        lines.append(report.message)
    lines.append(f"verdict: {report.verdict} (exit {report.exit_code})")
    return "\n".join(lines) + "\n"


def _json_value(value: Any) -> Any:
    if isinstance(value, (bool, int, float, str)) or value is None:
        return value
    if isinstance(value, (list, tuple)):
        return [_json_value(v) for v in value]
    return str(value)


def render_machine(report: Report) -> str:
    doc = {
        "command": report.command,
        "file": report.file,
        "options": {k: _json_value(v) for k, v in report.options},
        "sections": [
            {"title": s.title, "rows": [[k, _json_value(v)] for k, v in s.rows]} for s in report.sections
        ],
        "message": report.message,
        "verdict": report.verdict,
        "exit_code": report.exit_code,
    }
    return json.dumps(doc, indent=2, ensure_ascii=False) + "\n"


def render(report: Report, fmt: str = "text") -> str:
    return render_machine(report) if fmt == "machine" else render_text(report)
