"""
Check results and reports shared by every verification routine.

Two tiers:
- FATAL: a proved identity failed. In strict mode the check raises
  VerificationError immediately; otherwise the failure is recorded and the
  CLI exits with status 1.
- DEVIATION: an audited claim failed on a concrete case. A DeviationWarning
  is issued and the report lists it; the exit status is unaffected.
INFO results carry numbers worth printing (orders, ranks, audit values).
"""

import fnmatch
import json
import logging
import warnings
from dataclasses import dataclass, field
from enum import Enum
from typing import Any, Dict, Iterable, List, Optional

from ..exceptions import DeviationWarning, VerificationError

logger = logging.getLogger(__name__)


class Status(Enum):
    PASS = "pass"
    FAIL = "fail"
    DEVIATION = "deviation"
    INFO = "info"


class Severity(Enum):
    FATAL = "fatal"          # proved identity
    DEVIATION = "deviation"  # audited claim
    INFO = "info"


# Module-level strictness, set once by the CLI
_STRICT = False


def set_strict(strict: bool) -> None:
    global _STRICT
    _STRICT = bool(strict)


def is_strict() -> bool:
    return _STRICT


def _jsonable(value: Any) -> Any:
    """Tuples, ideals and enums to plain JSON values."""
    if value is None or isinstance(value, (bool, int, float, str)):
        return value
    if isinstance(value, Enum):
        return value.value
    if isinstance(value, dict):
        return {str(k): _jsonable(v) for k, v in value.items()}
    if isinstance(value, (list, tuple, set, frozenset)):
        items = [_jsonable(v) for v in value]
        return sorted(items, key=repr) if isinstance(value, (set, frozenset)) else items
    if hasattr(value, "key") and hasattr(value, "field"):
        return list(value.key)
    return str(value)


@dataclass
class CheckResult:
    check_id: str
    status: Status
    severity: Severity
    message: str = ""
    witness: Any = None
    data: Dict[str, Any] = field(default_factory=dict)

    @property
    def ok(self) -> bool:
        return self.status in (Status.PASS, Status.INFO)

    @property
    def is_fatal(self) -> bool:
        return self.status is Status.FAIL and self.severity is Severity.FATAL

    def to_dict(self) -> Dict[str, Any]:
        out = {
            "check_id": self.check_id,
            "status": self.status.value,
            "severity": self.severity.value,
            "message": self.message,
        }
        if self.witness is not None:
            out["witness"] = _jsonable(self.witness)
        if self.data:
            out["data"] = _jsonable(self.data)
        return out


def check(
    check_id: str,
    condition: bool,
    message: str = "",
    witness: Any = None,
    severity: Severity = Severity.FATAL,
    data: Optional[Dict[str, Any]] = None,
) -> CheckResult:
    """
    Record the outcome of one assertion.

    Raises:
        VerificationError: a FATAL check failed in strict mode.
    """
    data = data or {}
    if condition:
        return CheckResult(check_id, Status.PASS, severity, message, None, data)
    if severity is Severity.DEVIATION:
        warnings.warn(f"[{check_id}] {message}", DeviationWarning, stacklevel=2)
        return CheckResult(check_id, Status.DEVIATION, severity, message, witness, data)
    logger.error("check %s failed: %s (witness %r)", check_id, message, witness)
    if _STRICT:
        raise VerificationError(check_id, message, witness)
    return CheckResult(check_id, Status.FAIL, severity, message, witness, data)


def info(check_id: str, message: str, **data) -> CheckResult:
    return CheckResult(check_id, Status.INFO, Severity.INFO, message, None, data)


def first_failure(pairs: Iterable, predicate) -> Any:
    """The first item where predicate is false, or None."""
    for item in pairs:
        if not predicate(item):
            return item
    return None


@dataclass
class Report:
    """An ordered list of check results."""
    title: str
    results: List[CheckResult] = field(default_factory=list)

    def add(self, result: CheckResult) -> CheckResult:
        self.results.append(result)
        return result

    def extend(self, other: "Report") -> "Report":
        self.results.extend(other.results)
        return self

    @property
    def fatal(self) -> List[CheckResult]:
        return [r for r in self.results if r.is_fatal]

    @property
    def deviations(self) -> List[CheckResult]:
        return [r for r in self.results if r.status is Status.DEVIATION]

    @property
    def passed(self) -> bool:
        return not self.fatal

    def select(self, patterns: Iterable[str]) -> "Report":
        patterns = list(patterns)
        kept = [r for r in self.results if any(fnmatch.fnmatch(r.check_id, p) for p in patterns)]
        return Report(self.title, kept)

    def summary(self) -> Dict[str, int]:
        counts = {s.value: 0 for s in Status}
        for r in self.results:
            counts[r.status.value] += 1
        return counts

    def to_dict(self) -> Dict[str, Any]:
        return {
            "title": self.title,
            "summary": self.summary(),
            "results": [r.to_dict() for r in self.results],
        }

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), indent=2, sort_keys=True)


__all__ = [
    "CheckResult",
    "Report",
    "Severity",
    "Status",
    "check",
    "first_failure",
    "info",
    "is_strict",
    "set_strict",
]
