"""Three-valued outcomes and JSON-ready conversion of exact payloads."""

from __future__ import annotations

import dataclasses
import enum
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Any, Optional

from .numerics import Interval, IntervalSet, fmt_rat


class Status(str, enum.Enum):
    PROVEN = "proven"
    REFUTED = "refuted"
    UNKNOWN = "unknown"


@dataclass
class Verdict:
    """Outcome of a semi-decision procedure.

    ``payload`` is the certificate for Proven, the counterexample for
    Refuted, and free-form evidence for Unknown. ``depth`` records how far
    the search went, and ``label`` qualifies a Proven (for instance a
    finite-depth or up-to-expansion result).
    """

    status: Status
    payload: Any = None
    depth: Optional[int] = None
    label: str = ""
    notes: list[str] = field(default_factory=list)

    @property
    def proven(self) -> bool:
        return self.status is Status.PROVEN

    @property
    def refuted(self) -> bool:
        return self.status is Status.REFUTED

    @property
    def unknown(self) -> bool:
        return self.status is Status.UNKNOWN

    def __str__(self) -> str:
        tag = self.status.value + (f"({self.label})" if self.label else "")
        return tag if self.depth is None else f"{tag} @ depth {self.depth}"


def proven(payload=None, label: str = "", depth=None, notes=()) -> Verdict:
    return Verdict(Status.PROVEN, payload, depth, label, list(notes))


def refuted(payload=None, label: str = "", depth=None, notes=()) -> Verdict:
    return Verdict(Status.REFUTED, payload, depth, label, list(notes))


def unknown(payload=None, depth=None, label: str = "", notes=()) -> Verdict:
    return Verdict(Status.UNKNOWN, payload, depth, label, list(notes))


def to_data(obj: Any) -> Any:
    """Convert nested payloads to JSON-compatible data with rationals as strings."""
    if isinstance(obj, bool) or obj is None or isinstance(obj, (int, str)):
        return obj
    if isinstance(obj, Fraction):
        return fmt_rat(obj)
    if isinstance(obj, float):
        raise TypeError("floating point values are not allowed in payloads")
    if isinstance(obj, Interval):
        return [fmt_rat(obj.lo), fmt_rat(obj.hi)]
    if isinstance(obj, IntervalSet):
        return [to_data(p) for p in obj.parts]
    if isinstance(obj, enum.Enum):
        return obj.value
    if isinstance(obj, Verdict):
        out = {"status": obj.status.value, "payload": to_data(obj.payload)}
        if obj.depth is not None:
            out["depth"] = obj.depth
        if obj.label:
            out["label"] = obj.label
        if obj.notes:
            out["notes"] = list(obj.notes)
        return out
    if hasattr(obj, "to_data"):
        return obj.to_data()
    if dataclasses.is_dataclass(obj):
        return {f.name: to_data(getattr(obj, f.name)) for f in dataclasses.fields(obj)}
    if isinstance(obj, dict):
        return {str(k): to_data(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [to_data(v) for v in obj]
    raise TypeError(f"cannot serialize {type(obj).__name__}")
