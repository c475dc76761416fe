"""Structured (JSON:API collection) and curated CSV inputs, merged into validated objects."""
from __future__ import annotations

from collections import Counter
import csv
from dataclasses import dataclass, field
from datetime import date
import io
import json
import logging
import math
from typing import Any, Callable, Dict, Iterable, List, Mapping, Optional, Sequence, Tuple

from .catalog import (
    CosparId,
    DebrisObject,
    InterfaceMaterial,
    ObjectType,
    OrbitClass,
    Passivation,
    PropellantClass,
    parse_date,
    parse_enum,
    parse_passivation,
    validate_object,
)
from .criticality import GivenValues
from .errors import (
    DuplicateId,
    MalformedDocument,
    MalformedId,
    MissingColumn,
    MissingHeader,
    UnknownEnumValue,
    UnparsableCell,
    UnsupportedVersion,
)
from .survival import BreakupClass, RawEvent, RawEventType

logger = logging.getLogger(__name__)

SUPPORTED_JSONAPI_VERSIONS = ("1.0", "1.1")

ANNOTATION_COLUMNS: Tuple[str, ...] = (
    "cospar_id",
    "angular_rate_deg_s",
    "passivated",
    "propellant_class",
    "platform_name",
    "grapple_feature",
    "interface_material",
    "interface_clearance_m2",
    "failure_epoch",
    "failure_kind",
)
GIVEN_COLUMNS: Tuple[str, ...] = ("cospar_id", "orbit_age_years", "breakup_probability")
EVENT_COLUMNS: Tuple[str, ...] = ("cospar_id", "epoch", "event", "breakup_class")

# DISCOS objectClass strings that name an intact object we can classify.
OBJECT_CLASSES = {"payload": ObjectType.PAYLOAD, "rocket body": ObjectType.ROCKET_BODY}


@dataclass(frozen=True)
class Diagnostic:
    source: str
    location: str
    message: str

    def to_dict(self) -> Dict[str, str]:
        return {"source": self.source, "location": self.location, "message": self.message}


@dataclass(frozen=True)
class StructuredRecord:
    cospar_id: CosparId
    name: str
    object_type: ObjectType
    launch_epoch: date
    orbit_class: OrbitClass
    reentry_epoch: Optional[date] = None
    mass_kg: Optional[float] = None
    dimensions: Optional[Tuple[float, ...]] = None
    launcher_name: Optional[str] = None
    country: Optional[str] = None
    propellant: Optional[PropellantClass] = None


@dataclass(frozen=True)
class AnnotationRecord:
    cospar_id: CosparId
    angular_rate_deg_s: float
    passivated: Passivation
    propellant: PropellantClass
    platform_name: str
    grapple_feature: bool
    interface_material: InterfaceMaterial
    interface_clearance_m2: float
    failure_epoch: Optional[date] = None
    failure_kind: Optional[str] = None


@dataclass(frozen=True)
class StructuredPage:
    records: List[StructuredRecord]
    diagnostics: List[Diagnostic]
    next_link: Optional[str] = None


@dataclass(frozen=True)
class ParsedTable:
    records: List[Any]
    diagnostics: List[Diagnostic]


@dataclass(frozen=True)
class MergeResult:
    objects: List[DebrisObject]
    unmatched_structured: List[str]
    unmatched_annotations: List[str]
    diagnostics: List[Diagnostic] = field(default_factory=list)


# --- structured documents ---


def _optional_float(value: Any) -> Optional[float]:
    if value is None:
        return None
    number = float(value)
    if not math.isfinite(number):
        raise ValueError("not a finite number")
    return number


def _first(attributes: Mapping[str, Any], *keys: str) -> Any:
    for key in keys:
        if attributes.get(key) not in (None, ""):
            return attributes[key]
    return None


def _structured_record(resource: Any) -> StructuredRecord:
    if not isinstance(resource, dict) or not isinstance(resource.get("attributes"), dict):
        raise ValueError("resource has no attributes object")
    attrs = resource["attributes"]

    cospar = _first(attrs, "cosparId")
    if cospar is None:
        raise ValueError("missing cosparId")
    object_class = str(_first(attrs, "objectClass") or "")
    object_type = OBJECT_CLASSES.get(object_class.strip().lower())
    if object_type is None:
        raise ValueError(f"objectClass {object_class!r} is not a payload or rocket body")
    launch = _first(attrs, "launchEpoch", "firstEpoch")
    if launch is None:
        raise ValueError("missing launch epoch")
    orbit = _first(attrs, "orbitClass", "orbitalRegime")
    if orbit is None:
        raise ValueError("missing orbit class")

    dims = tuple(float(attrs[k]) for k in ("width", "height", "depth") if attrs.get(k) is not None)
    reentry = _first(attrs, "reentryEpoch")
    propellant = _first(attrs, "propellant")
    return StructuredRecord(
        cospar_id=CosparId(str(cospar)),
        name=str(_first(attrs, "name") or cospar),
        object_type=object_type,
        launch_epoch=parse_date(launch),
        orbit_class=parse_enum(OrbitClass, orbit),
        reentry_epoch=parse_date(reentry) if reentry is not None else None,
        mass_kg=_optional_float(attrs.get("mass")),
        dimensions=dims or None,
        launcher_name=_first(attrs, "launcherName"),
        country=_first(attrs, "country"),
        propellant=parse_enum(PropellantClass, propellant) if propellant is not None else None,
    )


def parse_structured_document(data: bytes) -> StructuredPage:
    """Parse one page of a JSON:API collection; bad resources are skipped with a diagnostic."""
    try:
        doc = json.loads(data)
    except (UnicodeDecodeError, json.JSONDecodeError) as exc:
        raise MalformedDocument(f"not a JSON document: {exc}") from exc
    if not isinstance(doc, dict) or not isinstance(doc.get("data"), list):
        raise MalformedDocument("top level must be an object with a 'data' array")

    jsonapi = doc.get("jsonapi")
    version = jsonapi.get("version") if isinstance(jsonapi, dict) else None
    if version is not None and str(version) not in SUPPORTED_JSONAPI_VERSIONS:
        raise UnsupportedVersion(version)

    records: List[StructuredRecord] = []
    diagnostics: List[Diagnostic] = []
    for index, resource in enumerate(doc["data"]):
        try:
            records.append(_structured_record(resource))
        except (ValueError, TypeError, MalformedId, UnknownEnumValue) as exc:
            ident = resource.get("id", "?") if isinstance(resource, dict) else "?"
            diagnostics.append(Diagnostic("structured", f"data[{index}] (id {ident})", f"skipped: {exc}"))
            logger.warning("skipped structured resource data[%d]: %s", index, exc)

    links = doc.get("links") if isinstance(doc.get("links"), dict) else {}
    next_link = links.get("next")
    return StructuredPage(records, diagnostics, next_link if isinstance(next_link, str) else None)


# --- delimited tables ---


def _read_table(
    data: bytes, source: str, columns: Sequence[str], optional: Sequence[str] = ()
) -> Tuple[List[Tuple[int, Dict[str, str]]], List[Diagnostic]]:
    """Validate the header by name and return (data row number, cells) pairs."""
    try:
        text = data.decode("utf-8-sig")
    except UnicodeDecodeError as exc:
        raise MissingHeader(f"{source}: not UTF-8 text") from exc
    reader = csv.reader(io.StringIO(text))
    header = next(reader, None)
    if not header or all(not cell.strip() for cell in header):
        raise MissingHeader(f"{source}: no header row")
    header = [cell.strip() for cell in header]

    for name in columns:
        if name not in header and name not in optional:
            raise MissingColumn(name)
    diagnostics = [
        Diagnostic(source, f"column {name}", "unknown column ignored") for name in header if name not in columns
    ]
    for diag in diagnostics:
        logger.warning("%s: %s %s", source, diag.location, diag.message)

    rows = []
    for row_no, cells in enumerate(reader, start=1):
        if not any(cell.strip() for cell in cells):
            continue
        padded = cells + [""] * (len(header) - len(cells))
        rows.append((row_no, {name: padded[i].strip() for i, name in enumerate(header)}))
    return rows, diagnostics


def _cell(row_no: int, cells: Mapping[str, str], column: str, convert: Callable[[str], Any], required: bool = True) -> Any:
    value = cells.get(column, "")
    if value == "":
        if required:
            raise UnparsableCell(row_no, column, value)
        return None
    try:
        return convert(value)
    except (ValueError, TypeError, MalformedId, UnknownEnumValue) as exc:
        raise UnparsableCell(row_no, column, value) from exc


def _finite(value: str) -> float:
    number = float(value)
    if not math.isfinite(number):
        raise ValueError("not a finite number")
    return number


def _boolean(value: str) -> bool:
    text = value.lower()
    if text in ("true", "1", "yes"):
        return True
    if text in ("false", "0", "no"):
        return False
    raise ValueError("not a boolean")


def parse_annotations(data: bytes) -> ParsedTable:
    """Parse the curated annotation CSV; any bad cell raises UnparsableCell(row, column)."""
    rows, diagnostics = _read_table(data, "annotations", ANNOTATION_COLUMNS)
    records = []
    for row_no, cells in rows:
        records.append(
            AnnotationRecord(
                cospar_id=_cell(row_no, cells, "cospar_id", CosparId),
                angular_rate_deg_s=_cell(row_no, cells, "angular_rate_deg_s", _finite),
                passivated=_cell(row_no, cells, "passivated", parse_passivation, required=False) or Passivation.UNKNOWN,
                propellant=_cell(row_no, cells, "propellant_class", lambda v: parse_enum(PropellantClass, v), required=False)
                or PropellantClass.UNKNOWN,
                platform_name=cells.get("platform_name", ""),
                grapple_feature=_cell(row_no, cells, "grapple_feature", _boolean),
                interface_material=_cell(row_no, cells, "interface_material", lambda v: parse_enum(InterfaceMaterial, v)),
                interface_clearance_m2=_cell(row_no, cells, "interface_clearance_m2", _finite),
                failure_epoch=_cell(row_no, cells, "failure_epoch", parse_date, required=False),
                failure_kind=cells.get("failure_kind") or None,
            )
        )
    return ParsedTable(records, diagnostics)


def _probability(value: str) -> float:
    number = _finite(value)
    if not 0 <= number <= 1:
        raise ValueError("probability outside [0, 1]")
    return number


def _age(value: str) -> float:
    number = _finite(value)
    if number < 0:
        raise ValueError("negative age")
    return number


def parse_given_values(data: bytes) -> ParsedTable:
    """Parse ``cospar_id,orbit_age_years,breakup_probability``; empty value cells mean "derive it"."""
    rows, diagnostics = _read_table(data, "given", GIVEN_COLUMNS)
    records = [
        GivenValues(
            cospar_id=_cell(row_no, cells, "cospar_id", CosparId).value,
            orbit_age_years=_cell(row_no, cells, "orbit_age_years", _age, required=False),
            breakup_probability=_cell(row_no, cells, "breakup_probability", _probability, required=False),
        )
        for row_no, cells in rows
    ]
    _reject_duplicates("given", (g.cospar_id for g in records))
    return ParsedTable(records, diagnostics)


def parse_events(data: bytes) -> ParsedTable:
    """Parse ``cospar_id,epoch,event,breakup_class``; epoch may be empty only for reentry_unknown."""
    rows, diagnostics = _read_table(data, "events", EVENT_COLUMNS, optional=("breakup_class",))
    records = []
    for row_no, cells in rows:
        event = _cell(row_no, cells, "event", RawEventType)
        epoch = _cell(row_no, cells, "epoch", parse_date, required=event is not RawEventType.REENTRY_UNKNOWN)
        breakup_class = None
        if event is RawEventType.BREAKUP:
            breakup_class = _cell(row_no, cells, "breakup_class", lambda v: parse_enum(BreakupClass, v))
        records.append(RawEvent(_cell(row_no, cells, "cospar_id", CosparId).value, event, epoch, breakup_class))
    return ParsedTable(records, diagnostics)


# --- merge ---


def _reject_duplicates(side: str, ids: Iterable[str]) -> None:
    counts = Counter(ids)
    duplicates = sorted(i for i, n in counts.items() if n > 1)
    if duplicates:
        raise DuplicateId(side, duplicates[0])


def merge(structured: Sequence[StructuredRecord], annotations: Sequence[AnnotationRecord]) -> MergeResult:
    """Inner join on COSPAR id; curated annotation values win any conflict with the structured feed."""
    _reject_duplicates("structured", (r.cospar_id.value for r in structured))
    _reject_duplicates("annotations", (a.cospar_id.value for a in annotations))

    by_id = {r.cospar_id.value: r for r in structured}
    notes = {a.cospar_id.value: a for a in annotations}
    diagnostics: List[Diagnostic] = []
    objects: List[DebrisObject] = []

    for cospar_id in sorted(by_id.keys() & notes.keys()):
        record, note = by_id[cospar_id], notes[cospar_id]
        if record.propellant is not None and record.propellant is not note.propellant:
            diagnostics.append(
                Diagnostic(
                    "merge",
                    cospar_id,
                    f"propellant conflict: structured {record.propellant.value}, annotation "
                    f"{note.propellant.value}; annotation wins",
                )
            )
            logger.info("%s: annotation-wins propellant conflict", cospar_id)
        platform = note.platform_name or record.launcher_name or ""
        objects.append(
            validate_object(
                {
                    "cospar_id": cospar_id,
                    "name": record.name,
                    "object_type": record.object_type,
                    "orbit_class": record.orbit_class,
                    "launch_epoch": record.launch_epoch,
                    "reentry_epoch": record.reentry_epoch,
                    "failure_epoch": note.failure_epoch,
                    "failure_kind": note.failure_kind,
                    "passivated": note.passivated,
                    # A curated "true" is the documentation the passivation invariant asks for.
                    "passivation_documented": note.passivated is Passivation.TRUE,
                    "propellant": note.propellant,
                    "platform_name": platform,
                    "mass_kg": record.mass_kg,
                    "angular_rate_deg_s": note.angular_rate_deg_s,
                    "grapple_feature": note.grapple_feature,
                    "interface_material": note.interface_material,
                    "interface_clearance_m2": note.interface_clearance_m2,
                }
            )
        )

    unmatched_structured = sorted(by_id.keys() - notes.keys())
    unmatched_annotations = sorted(notes.keys() - by_id.keys())
    if unmatched_structured or unmatched_annotations:
        logger.warning(
            "unmatched ids: %d structured, %d annotation", len(unmatched_structured), len(unmatched_annotations)
        )
    return MergeResult(objects, unmatched_structured, unmatched_annotations, diagnostics)


__all__ = [
    "ANNOTATION_COLUMNS",
    "GIVEN_COLUMNS",
    "EVENT_COLUMNS",
    "Diagnostic",
    "StructuredRecord",
    "AnnotationRecord",
    "StructuredPage",
    "ParsedTable",
    "MergeResult",
    "parse_structured_document",
    "parse_annotations",
    "parse_given_values",
    "parse_events",
    "merge",
]
