"""Runtime checks of the inequalities the embedding argument relies on.

In ``theoretical`` mode a failed check raises :class:`ProofInvariantError`;
in ``practical`` mode it is recorded and the run continues.  Either way the
full list of checks ends up in the run report.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from typing import Any

from .errors import ProofInvariantError

THEORETICAL = "theoretical"
PRACTICAL = "practical"


def _plain(x):
    if isinstance(x, Fraction):
        return float(x) if x.denominator != 1 else int(x)
    return x


@dataclass
class CheckRecord:
    name: str
    ok: bool
    measured: Any = None
    bound: Any = None
    note: str = ""

    def to_json(self) -> dict:
        return {
            "name": self.name,
            "ok": self.ok,
            "measured": _plain(self.measured),
            "bound": _plain(self.bound),
            "note": self.note,
        }


@dataclass
class Audit:
    mode: str = PRACTICAL
    records: list[CheckRecord] = field(default_factory=list)
    notes: list[str] = field(default_factory=list)

    def check(self, name: str, ok: bool, measured=None, bound=None, note: str = "") -> bool:
        rec = CheckRecord(name, bool(ok), measured, bound, note)
        self.records.append(rec)
        if not ok and self.mode == THEORETICAL:
            raise ProofInvariantError(f"check failed: {name} (measured {measured}, bound {bound})", self)
        return bool(ok)

    def note(self, text: str) -> None:
        self.notes.append(text)

    @property
    def failed(self) -> list[CheckRecord]:
        return [r for r in self.records if not r.ok]

    def to_json(self) -> dict:
        return {
            "mode": self.mode,
            "checks": [r.to_json() for r in self.records],
            "failed": [r.name for r in self.failed],
            "notes": list(self.notes),
        }
