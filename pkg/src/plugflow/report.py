"""Pass/fail reports for hypothesis verification suites."""

from __future__ import annotations

import dataclasses


@dataclasses.dataclass(frozen=True)
class CheckItem:
    name: str
    passed: bool
    detail: str = ""

    def line(self) -> str:
        mark = "pass" if self.passed else "FAIL"
        tail = f"  ({self.detail})" if self.detail else ""
        return f"[{mark}] {self.name}{tail}"


@dataclasses.dataclass
class VerifyReport:
    title: str
    items: list[CheckItem] = dataclasses.field(default_factory=list)

    def add(self, name: str, passed: bool, detail: str = "") -> None:
        self.items.append(CheckItem(name, bool(passed), detail))

    @property
    def ok(self) -> bool:
        return all(item.passed for item in self.items)

    def failures(self) -> list[CheckItem]:
        return [item for item in self.items if not item.passed]

    def lines(self) -> list[str]:
        head = f"== {self.title}: {'ok' if self.ok else 'FAILED'} =="
        return [head] + [item.line() for item in self.items]

    def text(self) -> str:
        return "\n".join(self.lines()) + "\n"

    def merged(self, other: "VerifyReport", title: str) -> "VerifyReport":
        return VerifyReport(title, self.items + other.items)
