"""Outcome of a check: violations make it fail; skipped cells are listed."""
from __future__ import annotations

from dataclasses import dataclass, field


@dataclass
class Report:
    name: str
    window: str = ""
    violations: list = field(default_factory=list)   # (cell, expected, found)
    skipped: list = field(default_factory=list)      # (cell, reason)
    checked: int = 0
    subreports: list = field(default_factory=list)
    notes: list = field(default_factory=list)

    @property
    def passed(self) -> bool:
        return not self.violations and all(r.passed for r in self.subreports)

    def add(self, cell, expected, found):
        self.violations.append((cell, expected, found))

    def skip(self, cell, reason: str):
        self.skipped.append((cell, reason))

    def summary(self, indent: str = "") -> str:
        status = "PASS" if self.passed else "FAIL"
        lines = [f"{indent}{status} {self.name} [{self.window}] checked={self.checked} "
                 f"violations={len(self.violations)} skipped={len(self.skipped)}"]
        for cell, exp, found in self.violations[:20]:
            lines.append(f"{indent}  violation at {cell}: expected {exp}, found {found}")
        for n in self.notes:
            lines.append(f"{indent}  note: {n}")
        for r in self.subreports:
            lines.append(r.summary(indent + "  "))
        return "\n".join(lines)
