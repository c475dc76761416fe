"""Exception hierarchy shared by every debris-triage module.

Three families map onto CLI exit codes: validation problems (1), I/O problems (2)
and schema problems (3).
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import Any, Dict, List, Optional


class TriageError(Exception):
    """Base class for all errors raised by the package."""

    exit_code = 1

    def details(self) -> Dict[str, Any]:
        return {}

    def to_report(self) -> Dict[str, Any]:
        """Return the machine-readable error report written by the CLI."""
        return {"error": type(self).__name__, "message": str(self), "details": self.details()}


class ValidationError(TriageError):
    exit_code = 1


class TriageIOError(TriageError):
    exit_code = 2


class SchemaError(TriageError):
    exit_code = 3


# --- catalog ---


@dataclass(frozen=True)
class Violation:
    """One problem found while validating a raw object."""

    kind: str
    field: str
    message: str

    def to_dict(self) -> Dict[str, str]:
        return {"kind": self.kind, "field": self.field, "message": self.message}


class ObjectValidationError(ValidationError):
    """Carries the complete list of violations for one raw object."""

    def __init__(self, violations: List[Violation], cospar_id: Optional[str] = None) -> None:
        self.violations = list(violations)
        self.cospar_id = cospar_id
        kinds = ", ".join(sorted({v.kind for v in self.violations}))
        super().__init__(f"{cospar_id or '<unknown>'}: {len(self.violations)} violation(s): {kinds}")

    def details(self) -> Dict[str, Any]:
        return {"cospar_id": self.cospar_id, "violations": [v.to_dict() for v in self.violations]}


class MalformedId(ValidationError):
    def __init__(self, value: Any) -> None:
        self.value = value
        super().__init__(f"malformed COSPAR id: {value!r}")


class NegativeAge(ValidationError):
    def __init__(self, launch_epoch: Any, epoch: Any) -> None:
        self.launch_epoch = launch_epoch
        self.epoch = epoch
        super().__init__(f"epoch {epoch} precedes launch epoch {launch_epoch}")


class UnknownEnumValue(ValidationError):
    def __init__(self, enum_name: str, value: Any) -> None:
        self.enum_name = enum_name
        self.value = value
        super().__init__(f"unknown {enum_name} value: {value!r}")


class IoFailure(TriageIOError):
    def __init__(self, path: Any, reason: str) -> None:
        self.path = str(path)
        super().__init__(f"{path}: {reason}")

    def details(self) -> Dict[str, Any]:
        return {"path": self.path}


class CorruptRecord(TriageIOError):
    def __init__(self, line: int, reason: str) -> None:
        self.line = line
        self.reason = reason
        super().__init__(f"corrupt record at line {line}: {reason}")

    def details(self) -> Dict[str, Any]:
        return {"line": self.line}


# --- ingest ---


class MalformedDocument(SchemaError):
    pass


class UnsupportedVersion(SchemaError):
    def __init__(self, version: Any) -> None:
        self.version = version
        super().__init__(f"unsupported document version: {version!r}")


class MissingHeader(SchemaError):
    pass


class MissingColumn(SchemaError):
    def __init__(self, name: str) -> None:
        self.name = name
        super().__init__(f"missing column: {name}")

    def details(self) -> Dict[str, Any]:
        return {"column": self.name}


class UnparsableCell(ValidationError):
    def __init__(self, row: int, column: str, value: Any) -> None:
        self.row = row
        self.column = column
        self.value = value
        super().__init__(f"row {row}, column {column}: cannot parse {value!r}")

    def details(self) -> Dict[str, Any]:
        return {"row": self.row, "column": self.column}


class DuplicateId(ValidationError):
    def __init__(self, side: str, cospar_id: str) -> None:
        self.side = side
        self.id = cospar_id
        super().__init__(f"duplicate id {cospar_id} in {side} records")

    def details(self) -> Dict[str, Any]:
        return {"side": self.side, "id": self.id}


# --- survival ---


class EmptyInput(ValidationError):
    pass


class UnknownSubject(ValidationError):
    def __init__(self, cospar_id: str) -> None:
        self.id = cospar_id
        super().__init__(f"unknown subject {cospar_id}")


class EventAfterWindow(ValidationError):
    def __init__(self, cospar_id: str, epoch: Any, window_end: Any) -> None:
        self.id = cospar_id
        self.epoch = epoch
        self.window_end = window_end
        super().__init__(f"{cospar_id}: {epoch} lies after the observation window end {window_end}")


# --- criticality / classifier ---


class OutOfRange(ValidationError):
    def __init__(self, name: str, value: Any) -> None:
        self.name = name
        self.value = value
        super().__init__(f"{name} out of range: {value!r}")


class SchemaViolation(SchemaError):
    def __init__(self, path: str, message: str) -> None:
        self.path = path
        super().__init__(f"{path}: {message}")

    def details(self) -> Dict[str, Any]:
        return {"path": self.path}


class DuplicateRuleName(SchemaError):
    def __init__(self, name: str) -> None:
        self.name = name
        super().__init__(f"duplicate rule name: {name}")


class EmptySlotSet(SchemaError):
    def __init__(self, rule: str, slot: str) -> None:
        self.rule = rule
        self.slot = slot
        super().__init__(f"rule {rule}: slot {slot} is an empty set")


# --- cli ---


class InvalidArguments(SchemaError):
    """Command-line arguments click could not accept."""

    def __init__(self, message: str, parameter: Optional[str] = None) -> None:
        self.parameter = parameter
        super().__init__(message)

    def details(self) -> Dict[str, Any]:
        return {"parameter": self.parameter} if self.parameter else {}


# --- report ---


class IdMismatch(ValidationError):
    def __init__(self, missing: List[str]) -> None:
        self.missing = sorted(missing)
        super().__init__(f"ids not aligned across results/assessments/objects: {', '.join(self.missing)}")

    def details(self) -> Dict[str, Any]:
        return {"ids": self.missing}


__all__ = [
    "TriageError",
    "ValidationError",
    "TriageIOError",
    "SchemaError",
    "Violation",
    "ObjectValidationError",
    "MalformedId",
    "NegativeAge",
    "UnknownEnumValue",
    "IoFailure",
    "CorruptRecord",
    "MalformedDocument",
    "UnsupportedVersion",
    "MissingHeader",
    "MissingColumn",
    "UnparsableCell",
    "DuplicateId",
    "EmptyInput",
    "UnknownSubject",
    "EventAfterWindow",
    "OutOfRange",
    "SchemaViolation",
    "DuplicateRuleName",
    "EmptySlotSet",
    "InvalidArguments",
    "IdMismatch",
]
