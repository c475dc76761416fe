"""Typed model, validation and newline-delimited persistence for intact derelict objects."""
from __future__ import annotations

from dataclasses import dataclass
from datetime import date
from enum import Enum
import json
import logging
import math
import re
from typing import Any, Callable, Dict, Iterable, List, Mapping, Optional, Tuple, Type, TypeVar

from .errors import (
    CorruptRecord,
    MalformedId,
    NegativeAge,
    ObjectValidationError,
    UnknownEnumValue,
    UnsupportedVersion,
    Violation,
)
from .fileio import PathLike, atomic_write_text, read_bytes

logger = logging.getLogger(__name__)

FORMAT_VERSION = "debris-triage/1"
DAYS_PER_YEAR = 365.25
FIRST_LAUNCH_YEAR = 1957

_COSPAR_PATTERN = re.compile(r"^(\d{4})-(\d{3})([A-Z]{1,3})$")


@dataclass(frozen=True, order=True)
class CosparId:
    """International designator, e.g. ``1978-018B``."""

    value: str

    def __post_init__(self) -> None:
        if not isinstance(self.value, str):
            raise MalformedId(self.value)
        trimmed = self.value.strip()
        match = _COSPAR_PATTERN.match(trimmed)
        if match is None or not FIRST_LAUNCH_YEAR <= int(match.group(1)) <= date.today().year:
            raise MalformedId(self.value)
        object.__setattr__(self, "value", trimmed)

    @property
    def launch_year(self) -> int:
        return int(self.value[:4])

    def __str__(self) -> str:
        return self.value


class ObjectType(str, Enum):
    PAYLOAD = "Payload"
    ROCKET_BODY = "RocketBody"

    @property
    def code(self) -> str:
        return "PL" if self is ObjectType.PAYLOAD else "RB"


class PropellantClass(str, Enum):
    CRYOGENIC = "Cryogenic"
    HYPERGOLIC = "Hypergolic"
    PETROLEUM = "Petroleum"
    SOLID = "Solid"
    HYBRID = "Hybrid"
    NO_PROPELLANT = "NoPropellant"
    OTHER = "Other"
    UNKNOWN = "Unknown"

    @property
    def is_liquid(self) -> bool:
        return self in (PropellantClass.CRYOGENIC, PropellantClass.HYPERGOLIC, PropellantClass.PETROLEUM)


class OrbitClass(str, Enum):
    LEO = "LEO"
    MEO = "MEO"
    GEO = "GEO"
    GTO = "GTO"
    HEO = "HEO"


class InterfaceMaterial(str, Enum):
    ISOTROPIC = "Isotropic"
    ANISOTROPIC = "Anisotropic"


class Passivation(str, Enum):
    """Tri-state passivation as found in curated sources."""

    TRUE = "true"
    FALSE = "false"
    UNKNOWN = "unknown"

    def collapse(self) -> bool:
        return self is Passivation.TRUE


E = TypeVar("E", bound=Enum)

# Spellings accepted on input besides the canonical enum values.
_ALIASES: Dict[Type[Enum], Dict[str, Enum]] = {
    ObjectType: {
        "pl": ObjectType.PAYLOAD,
        "payload": ObjectType.PAYLOAD,
        "rb": ObjectType.ROCKET_BODY,
        "rocketbody": ObjectType.ROCKET_BODY,
        "rocket body": ObjectType.ROCKET_BODY,
        "rocket_body": ObjectType.ROCKET_BODY,
    },
    PropellantClass: {
        "none": PropellantClass.NO_PROPELLANT,
        "no_propellant": PropellantClass.NO_PROPELLANT,
        "no propellant": PropellantClass.NO_PROPELLANT,
    },
}


def parse_enum(enum_cls: Type[E], raw: Any) -> E:
    """Map a raw value onto ``enum_cls`` case-insensitively; raise UnknownEnumValue otherwise."""
    if isinstance(raw, enum_cls):
        return raw
    text = str(raw).strip().lower() if raw is not None else ""
    for member in enum_cls:
        if member.value.lower() == text:
            return member
    alias = _ALIASES.get(enum_cls, {}).get(text)
    if alias is not None:
        return alias  # type: ignore[return-value]
    raise UnknownEnumValue(enum_cls.__name__, raw)


def parse_passivation(raw: Any) -> Passivation:
    if raw is None or raw == "":
        return Passivation.UNKNOWN
    if isinstance(raw, bool):
        return Passivation.TRUE if raw else Passivation.FALSE
    return parse_enum(Passivation, raw)


_TIME_PART = r"\d{2}:\d{2}(:\d{2}(\.\d+)?)?(Z|[+-]\d{2}:?\d{2})?"


def parse_date(raw: Any) -> date:
    """Accept ``date`` objects, ``YYYY-MM-DD`` and ``YYYY-MM`` (first day of month)."""
    if isinstance(raw, date):
        return raw
    text = str(raw).strip()
    if re.fullmatch(r"\d{4}-\d{2}", text):
        text += "-01"
    # DISCOS-style timestamps carry a time part we do not need.
    day, sep, rest = text.partition("T")
    if not re.fullmatch(r"\d{4}-\d{2}-\d{2}", day):
        raise ValueError(f"not an ISO date: {text!r}")
    if sep and not re.fullmatch(_TIME_PART, rest):
        raise ValueError(f"not an ISO date: {text!r}")
    return date.fromisoformat(day)


@dataclass(frozen=True)
class DebrisObject:
    """One cataloged intact object, validated and immutable."""

    cospar_id: CosparId
    name: str
    object_type: ObjectType
    orbit_class: OrbitClass
    launch_epoch: date
    reentry_epoch: Optional[date]
    deactivation_epoch: Optional[date]
    failure_epoch: Optional[date]
    failure_kind: Optional[str]
    passivated: bool
    passivation_documented: bool
    propellant: PropellantClass
    platform_name: str
    mass_kg: Optional[float]
    angular_rate_deg_s: float
    grapple_feature: bool
    interface_material: InterfaceMaterial
    interface_clearance_m2: float

    @property
    def id(self) -> str:
        return self.cospar_id.value

    def to_record(self) -> Dict[str, Any]:
        """Serialise in the fixed documented key order."""
        return {
            "cospar_id": self.cospar_id.value,
            "name": self.name,
            "object_type": self.object_type.value,
            "orbit_class": self.orbit_class.value,
            "launch_epoch": self.launch_epoch.isoformat(),
            "reentry_epoch": _iso(self.reentry_epoch),
            "deactivation_epoch": _iso(self.deactivation_epoch),
            "failure_epoch": _iso(self.failure_epoch),
            "failure_kind": self.failure_kind,
            "passivated": self.passivated,
            "passivation_documented": self.passivation_documented,
            "propellant": self.propellant.value,
            "platform_name": self.platform_name,
            "mass_kg": self.mass_kg,
            "angular_rate_deg_s": self.angular_rate_deg_s,
            "grapple_feature": self.grapple_feature,
            "interface_material": self.interface_material.value,
            "interface_clearance_m2": self.interface_clearance_m2,
        }


RECORD_FIELDS: Tuple[str, ...] = (
    "cospar_id",
    "name",
    "object_type",
    "orbit_class",
    "launch_epoch",
    "reentry_epoch",
    "deactivation_epoch",
    "failure_epoch",
    "failure_kind",
    "passivated",
    "passivation_documented",
    "propellant",
    "platform_name",
    "mass_kg",
    "angular_rate_deg_s",
    "grapple_feature",
    "interface_material",
    "interface_clearance_m2",
)

_REQUIRED = (
    "cospar_id",
    "object_type",
    "launch_epoch",
    "orbit_class",
    "angular_rate_deg_s",
    "grapple_feature",
    "interface_material",
    "interface_clearance_m2",
)


def _iso(value: Optional[date]) -> Optional[str]:
    return value.isoformat() if value is not None else None


def _is_blank(value: Any) -> bool:
    return value is None or (isinstance(value, str) and not value.strip())


class _Collector:
    """Gathers every violation for one raw object instead of stopping at the first."""

    def __init__(self, raw: Mapping[str, Any]) -> None:
        self.raw = raw
        self.violations: List[Violation] = []

    def add(self, kind: str, field: str, message: str) -> None:
        self.violations.append(Violation(kind, field, message))

    def convert(self, field: str, func: Callable[[Any], Any], kind: str = "UnparsableValue") -> Any:
        value = self.raw.get(field)
        if _is_blank(value):
            return None
        try:
            return func(value)
        except UnknownEnumValue as exc:
            self.add("UnknownEnumValue", field, str(exc))
        except MalformedId as exc:
            self.add("MalformedId", field, str(exc))
        except (TypeError, ValueError) as exc:
            self.add(kind, field, f"cannot parse {value!r}: {exc}")
        return None


def _finite(value: Any) -> float:
    number = float(value)
    if not math.isfinite(number):
        raise ValueError("not a finite number")
    return number


def _boolean(value: Any) -> bool:
    if isinstance(value, bool):
        return value
    text = str(value).strip().lower()
    if text in ("true", "1", "yes"):
        return True
    if text in ("false", "0", "no"):
        return False
    raise ValueError("not a boolean")


def _build(raw: Mapping[str, Any]) -> Tuple[Optional[DebrisObject], List[Violation]]:
    c = _Collector(raw)
    for field in _REQUIRED:
        if _is_blank(raw.get(field)):
            c.add("MissingField", field, "required field is missing")

    cospar_id = c.convert("cospar_id", CosparId)
    object_type = c.convert("object_type", lambda v: parse_enum(ObjectType, v))
    orbit_class = c.convert("orbit_class", lambda v: parse_enum(OrbitClass, v))
    propellant = c.convert("propellant", lambda v: parse_enum(PropellantClass, v)) or PropellantClass.UNKNOWN
    material = c.convert("interface_material", lambda v: parse_enum(InterfaceMaterial, v))

    launch = c.convert("launch_epoch", parse_date)
    reentry = c.convert("reentry_epoch", parse_date)
    deactivation = c.convert("deactivation_epoch", parse_date)
    failure = c.convert("failure_epoch", parse_date)
    if launch is not None:
        for field, value in (("reentry_epoch", reentry), ("deactivation_epoch", deactivation), ("failure_epoch", failure)):
            if value is not None and value < launch:
                c.add("DateOrderViolation", field, f"{value} precedes launch epoch {launch}")

    rate = c.convert("angular_rate_deg_s", _finite)
    if rate is not None and rate < 0:
        c.add("NegativeQuantity", "angular_rate_deg_s", f"{rate} < 0")
    clearance = c.convert("interface_clearance_m2", _finite)
    if clearance is not None and clearance <= 0:
        c.add("NegativeQuantity", "interface_clearance_m2", f"{clearance} must be > 0")
    mass = c.convert("mass_kg", _finite)
    if mass is not None and mass <= 0:
        c.add("NegativeQuantity", "mass_kg", f"{mass} must be > 0")

    grapple = c.convert("grapple_feature", _boolean)
    documented = c.convert("passivation_documented", _boolean) or False
    passivation = c.convert("passivated", parse_passivation) or Passivation.UNKNOWN
    passivated = passivation.collapse()
    if passivated and deactivation is None and not documented:
        c.add("UnsupportedPassivation", "passivated", "passivated=true needs a deactivation epoch or documentation")

    if c.violations:
        return None, c.violations

    failure_kind = raw.get("failure_kind")
    obj = DebrisObject(
        cospar_id=cospar_id,
        name=str(raw.get("name") or cospar_id.value),
        object_type=object_type,
        orbit_class=orbit_class,
        launch_epoch=launch,
        reentry_epoch=reentry,
        deactivation_epoch=deactivation,
        failure_epoch=failure,
        failure_kind=None if _is_blank(failure_kind) else str(failure_kind),
        passivated=passivated,
        passivation_documented=documented,
        propellant=propellant,
        platform_name=str(raw.get("platform_name") or ""),
        mass_kg=mass,
        angular_rate_deg_s=rate,
        grapple_feature=grapple,
        interface_material=material,
        interface_clearance_m2=clearance,
    )
    return obj, []


def check_object(raw: Mapping[str, Any]) -> List[Violation]:
    """Return every violation in ``raw``; an empty list means it validates."""
    return _build(raw)[1]


def validate_object(raw: Mapping[str, Any]) -> DebrisObject:
    """Validate a raw field map, raising ObjectValidationError with the complete violation list."""
    obj, violations = _build(raw)
    if violations:
        raw_id = raw.get("cospar_id")
        raise ObjectValidationError(violations, None if _is_blank(raw_id) else str(raw_id).strip())
    return obj  # type: ignore[return-value]


def orbit_age_years(launch_epoch: date, epoch: date) -> float:
    """Orbit age in Julian years of 365.25 days."""
    if epoch < launch_epoch:
        raise NegativeAge(launch_epoch, epoch)
    return (epoch - launch_epoch).days / DAYS_PER_YEAR


def _dumps(record: Mapping[str, Any]) -> str:
    return json.dumps(record, ensure_ascii=False, separators=(",", ":"))


def render_store(objects: Iterable[DebrisObject]) -> str:
    ordered = sorted(objects, key=lambda o: o.cospar_id.value)
    lines = [_dumps({"format": FORMAT_VERSION, "fields": list(RECORD_FIELDS)})]
    lines.extend(_dumps(obj.to_record()) for obj in ordered)
    return "\n".join(lines) + "\n"


def store(objects: Iterable[DebrisObject], path: PathLike) -> int:
    """Write objects sorted by COSPAR id, one JSON record per line, after a format header."""
    objects = list(objects)
    atomic_write_text(path, render_store(objects))
    logger.info("stored %d object(s) to %s", len(objects), path)
    return len(objects)


def parse_store(text: str) -> List[DebrisObject]:
    lines = text.split("\n")
    if lines and lines[-1] == "":
        lines.pop()
    if not lines:
        return []

    try:
        header = json.loads(lines[0])
    except json.JSONDecodeError as exc:
        raise CorruptRecord(1, f"unreadable header: {exc.msg}") from exc
    if not isinstance(header, dict) or "format" not in header:
        raise CorruptRecord(1, "missing format header")
    if header["format"] != FORMAT_VERSION:
        raise UnsupportedVersion(header["format"])

    objects: List[DebrisObject] = []
    for line_no, line in enumerate(lines[1:], start=2):
        try:
            record = json.loads(line)
        except json.JSONDecodeError as exc:
            raise CorruptRecord(line_no, exc.msg) from exc
        if not isinstance(record, dict) or tuple(record) != RECORD_FIELDS:
            raise CorruptRecord(line_no, "fields differ from the documented record layout")
        obj, violations = _build(record)
        if violations:
            raise CorruptRecord(line_no, "; ".join(f"{v.field}: {v.kind}" for v in violations))
        objects.append(obj)  # type: ignore[arg-type]
    return objects


def load(path: PathLike) -> List[DebrisObject]:
    data = read_bytes(path)
    try:
        text = data.decode("utf-8")
    except UnicodeDecodeError as exc:
        raise CorruptRecord(data[: exc.start].count(b"\n") + 1, "not valid UTF-8") from exc
    return parse_store(text)


__all__ = [
    "FORMAT_VERSION",
    "RECORD_FIELDS",
    "CosparId",
    "ObjectType",
    "PropellantClass",
    "OrbitClass",
    "InterfaceMaterial",
    "Passivation",
    "DebrisObject",
    "parse_enum",
    "parse_passivation",
    "parse_date",
    "check_object",
    "validate_object",
    "orbit_age_years",
    "render_store",
    "store",
    "parse_store",
    "load",
]
