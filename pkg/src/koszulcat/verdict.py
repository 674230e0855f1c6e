"""Pass/fail results that carry the location of the first failures."""

from __future__ import annotations

from dataclasses import dataclass, field


@dataclass
class Verdict:
    name: str = "check"
    failures: list = field(default_factory=list)
    details: dict = field(default_factory=dict)

    @property
    def ok(self) -> bool:
        return not self.failures

    def __bool__(self):
        return self.ok

    def fail(self, where, message):
        self.failures.append((str(where), str(message)))
        return self

    def merge(self, other: "Verdict", prefix=""):
        for w, m in other.failures:
            self.failures.append((f"{prefix}{w}", m))
        return self

    def first(self):
        return self.failures[0] if self.failures else None

    def summary(self) -> str:
        if self.ok:
            return f"{self.name}: ok"
        w, m = self.failures[0]
        more = f" (+{len(self.failures) - 1} more)" if len(self.failures) > 1 else ""
        return f"{self.name}: FAIL at {w}: {m}{more}"

    def __repr__(self):
        return f"Verdict({self.summary()!r})"

    def as_dict(self):
        return {"name": self.name, "ok": self.ok,
                "failures": [{"where": w, "message": m} for w, m in self.failures],
                "details": self.details}
