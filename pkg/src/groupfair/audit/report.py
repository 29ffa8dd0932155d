from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from typing import Any


@dataclass
class AuditReport:
    """Outcome of one checker run.

    ``stats["checked"]`` counts the cases examined; fairness checkers also
    record ``stats["levels"]``, the worst value found per group or agent
    (the largest quota the rule would meet).
    """

    notion: str
    mode: str
    verdict: bool
    witnesses: list[dict[str, Any]] = field(default_factory=list)
    stats: dict[str, Any] = field(default_factory=dict)

    def __post_init__(self) -> None:
        if not self.verdict and not self.witnesses:
            raise AssertionError("a false verdict needs a witness")

    def __bool__(self) -> bool:
        return self.verdict

    @property
    def checked(self) -> int:
        return int(self.stats.get("checked", 0))

    @property
    def levels(self) -> list[Fraction] | None:
        return self.stats.get("levels")

    def to_json(self) -> dict[str, Any]:
        out: dict[str, Any] = {
            "notion": self.notion,
            "mode": self.mode,
            "verdict": self.verdict,
            "witnesses": [_jsonable(w) for w in self.witnesses],
            "checked": self.checked,
        }
        if self.levels is not None:
            out["levels"] = [str(x) for x in self.levels]
        return out


def _jsonable(value: Any) -> Any:
    if isinstance(value, Fraction):
        return str(value)
    if isinstance(value, dict):
        return {k: _jsonable(v) for k, v in value.items()}
    if isinstance(value, (list, tuple)):
        return [_jsonable(v) for v in value]
    return value
