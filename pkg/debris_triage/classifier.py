"""Uncooperativeness profiles and the capture-method rule engine.

A rule is a conjunction of slots; each slot is either a set of accepted values or Any.
Every rule is evaluated for every profile so the explanation covers misses as well as hits.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from enum import Enum
from importlib import resources
import json
import logging
import math
from typing import Any, Dict, FrozenSet, Iterable, List, Mapping, Optional, Sequence, Tuple

import jsonschema

from .catalog import DebrisObject, InterfaceMaterial, ObjectType
from .config import DEFAULT_THRESHOLDS, ThresholdConfig
from .criticality import CriticalityAssessment, CriticalityLevel
from .errors import DuplicateRuleName, EmptySlotSet, OutOfRange, SchemaViolation

logger = logging.getLogger(__name__)


class AttitudeRegime(str, Enum):
    STABLE = "stable"
    SLOW = "slow"
    MEDIUM = "medium"
    FAST = "fast"

    @property
    def label(self) -> str:
        return {"stable": "Stable", "slow": "SlowTumbling", "medium": "MediumTumbling", "fast": "FastTumbling"}[self.value]


class ClearanceClass(str, Enum):
    NARROW = "narrow"
    BROAD = "broad"


def attitude_regime(omega_deg_s: float, cfg: ThresholdConfig = DEFAULT_THRESHOLDS) -> AttitudeRegime:
    """0 is stable; (0, slow) slow; [slow, medium) medium; [medium, inf) fast."""
    if not math.isfinite(omega_deg_s) or omega_deg_s < 0:
        raise OutOfRange("angular rate", omega_deg_s)
    if omega_deg_s == 0:
        return AttitudeRegime.STABLE
    if omega_deg_s < cfg.slow_max_deg_s:
        return AttitudeRegime.SLOW
    if omega_deg_s < cfg.medium_max_deg_s:
        return AttitudeRegime.MEDIUM
    return AttitudeRegime.FAST


def clearance_class(area_m2: float, cfg: ThresholdConfig = DEFAULT_THRESHOLDS) -> ClearanceClass:
    if not math.isfinite(area_m2) or area_m2 <= 0:
        raise OutOfRange("interface clearance", area_m2)
    return ClearanceClass.NARROW if area_m2 < cfg.clearance_broad_min_m2 else ClearanceClass.BROAD


@dataclass(frozen=True)
class UncooperativenessProfile:
    cospar_id: str
    object_type: ObjectType
    criticality: CriticalityLevel
    passivated: bool
    regime: AttitudeRegime
    grapple_feature: bool
    material: InterfaceMaterial
    clearance: ClearanceClass


def profile(
    obj: DebrisObject, assessment: CriticalityAssessment, cfg: ThresholdConfig = DEFAULT_THRESHOLDS
) -> UncooperativenessProfile:
    return UncooperativenessProfile(
        cospar_id=obj.id,
        object_type=obj.object_type,
        criticality=assessment.level,
        passivated=obj.passivated,
        regime=attitude_regime(obj.angular_rate_deg_s, cfg),
        grapple_feature=obj.grapple_feature,
        material=obj.interface_material,
        clearance=clearance_class(obj.interface_clearance_m2, cfg),
    )


# (rule slot, profile attribute)
SLOTS: Tuple[Tuple[str, str], ...] = (
    ("object_type", "object_type"),
    ("criticality", "criticality"),
    ("passivated", "passivated"),
    ("regimes", "regime"),
    ("grapple_feature", "grapple_feature"),
    ("material", "material"),
    ("clearance", "clearance"),
)


def _render(value: Any) -> str:
    if isinstance(value, bool):
        return "true" if value else "false"
    if isinstance(value, ObjectType):
        return value.code
    if isinstance(value, Enum):
        return str(value.value)
    return str(value)


def _render_set(values: Optional[FrozenSet[Any]]) -> str:
    if values is None:
        return "Any"
    return "{" + ", ".join(sorted(_render(v) for v in values)) + "}"


@dataclass(frozen=True)
class CaptureRule:
    """One conjunctive class axiom; a slot of None accepts anything."""

    name: str
    object_type: Optional[FrozenSet[ObjectType]] = None
    criticality: Optional[FrozenSet[CriticalityLevel]] = None
    passivated: Optional[FrozenSet[bool]] = None
    regimes: Optional[FrozenSet[AttitudeRegime]] = None
    grapple_feature: Optional[FrozenSet[bool]] = None
    material: Optional[FrozenSet[InterfaceMaterial]] = None
    clearance: Optional[FrozenSet[ClearanceClass]] = None

    def __post_init__(self) -> None:
        for slot, _ in SLOTS:
            values = getattr(self, slot)
            if values is not None and len(values) == 0:
                raise EmptySlotSet(self.name, slot)

    def to_config(self) -> Dict[str, Any]:
        doc: Dict[str, Any] = {"name": self.name}
        if self.object_type is not None:
            codes = sorted(t.code for t in self.object_type)
            doc["object_type"] = codes[0] if len(codes) == 1 else codes
        for slot in ("criticality", "regimes", "material", "clearance"):
            values = getattr(self, slot)
            if values is not None:
                doc[slot] = sorted(v.value.lower() for v in values)
        for slot in ("passivated", "grapple_feature"):
            values = getattr(self, slot)
            if values is not None:
                doc[slot] = next(iter(values)) if len(values) == 1 else sorted(values)
        return doc


@dataclass(frozen=True)
class SlotTrace:
    slot: str
    required: str
    actual: str
    satisfied: bool


@dataclass(frozen=True)
class RuleTrace:
    rule: str
    slots: Tuple[SlotTrace, ...]

    @property
    def matched(self) -> bool:
        return all(s.satisfied for s in self.slots)

    @property
    def violated(self) -> Tuple[SlotTrace, ...]:
        return tuple(s for s in self.slots if not s.satisfied)


@dataclass(frozen=True)
class ClassificationResult:
    cospar_id: str
    matched: FrozenSet[str]
    traces: Tuple[RuleTrace, ...] = field(default=())

    @property
    def unclassified(self) -> bool:
        return not self.matched

    def to_record(self) -> Dict[str, Any]:
        return {
            "cospar_id": self.cospar_id,
            "matched": sorted(self.matched),
            "traces": {
                t.rule: [
                    {"slot": s.slot, "required": s.required, "actual": s.actual, "satisfied": s.satisfied}
                    for s in t.slots
                ]
                for t in self.traces
            },
        }


def _trace(rule: CaptureRule, p: UncooperativenessProfile) -> RuleTrace:
    slots = []
    for slot, attribute in SLOTS:
        accepted = getattr(rule, slot)
        actual = getattr(p, attribute)
        slots.append(SlotTrace(slot, _render_set(accepted), _render(actual), accepted is None or actual in accepted))
    return RuleTrace(rule.name, tuple(slots))


def classify(p: UncooperativenessProfile, rules: Sequence[CaptureRule]) -> ClassificationResult:
    """Multi-label evaluation: every rule whose slots all accept the profile matches."""
    traces = tuple(sorted((_trace(rule, p) for rule in rules), key=lambda t: t.rule))
    matched = frozenset(t.rule for t in traces if t.matched)
    if not matched:
        logger.info("%s: no capture rule matched", p.cospar_id)
    return ClassificationResult(p.cospar_id, matched, traces)


def explain(result: ClassificationResult) -> str:
    """Deterministic trace text: matched rules first, then rejected ones, each by name."""
    if result.matched:
        lines = [f"{result.cospar_id}: {len(result.matched)} rule(s) matched: {', '.join(sorted(result.matched))}"]
    else:
        lines = [f"{result.cospar_id}: Unclassified - no rule matched"]

    ordered = sorted(result.traces, key=lambda t: (not t.matched, t.rule))
    for trace in ordered:
        lines.append("")
        lines.append(f"[{'MATCHED' if trace.matched else 'REJECTED'}] {trace.rule}")
        for s in trace.slots:
            if s.satisfied:
                lines.append(f"  {s.slot}: {s.required} accepts {s.actual}")
            else:
                lines.append(f"  {s.slot}: required {s.required}, found {s.actual}")
    return "\n".join(lines) + "\n"


_LOW_MEDIUM = frozenset({CriticalityLevel.LOW, CriticalityLevel.MEDIUM})
_STABLE_TO_MEDIUM = frozenset({AttitudeRegime.STABLE, AttitudeRegime.SLOW, AttitudeRegime.MEDIUM})
_FAST = frozenset({AttitudeRegime.FAST})
_PL = frozenset({ObjectType.PAYLOAD})
_RB = frozenset({ObjectType.ROCKET_BODY})


def default_rules() -> List[CaptureRule]:
    """The eight shipped capture-method axioms."""
    return [
        CaptureRule(
            "Manipulator_Based",
            criticality=frozenset({CriticalityLevel.LOW}),
            regimes=_STABLE_TO_MEDIUM,
            grapple_feature=frozenset({True}),
        ),
        CaptureRule(
            "Clamp_Based",
            object_type=_RB,
            criticality=frozenset({CriticalityLevel.LOW}),
            regimes=_STABLE_TO_MEDIUM,
            grapple_feature=frozenset({False}),
            clearance=frozenset({ClearanceClass.BROAD}),
        ),
        CaptureRule("Net_Based", criticality=_LOW_MEDIUM, regimes=_STABLE_TO_MEDIUM),
        CaptureRule(
            "Harpoon_Based",
            object_type=_PL,
            passivated=frozenset({True}),
            regimes=frozenset({AttitudeRegime.STABLE, AttitudeRegime.SLOW}),
            grapple_feature=frozenset({False}),
            material=frozenset({InterfaceMaterial.ISOTROPIC}),
        ),
        CaptureRule("Plume_Impingement", object_type=_PL, criticality=_LOW_MEDIUM, regimes=_FAST),
        CaptureRule("Electromagnetic_Based", object_type=_RB, criticality=_LOW_MEDIUM, regimes=_FAST),
        CaptureRule("Ablation_Based", object_type=_PL, passivated=frozenset({True}), regimes=_FAST),
        CaptureRule(
            "No_Solution",
            criticality=frozenset({CriticalityLevel.HIGH}),
            passivated=frozenset({False}),
            regimes=_FAST,
        ),
    ]


def _string_set(values: Iterable[str]) -> Dict[str, Any]:
    return {"type": "array", "items": {"enum": list(values)}}


RULE_CONFIG_SCHEMA: Dict[str, Any] = {
    "type": "object",
    "required": ["rules"],
    "additionalProperties": False,
    "properties": {
        "rules": {
            "type": "array",
            "items": {
                "type": "object",
                "required": ["name"],
                "additionalProperties": False,
                "properties": {
                    "name": {"type": "string", "minLength": 1},
                    "object_type": {"oneOf": [{"enum": ["PL", "RB"]}, _string_set(["PL", "RB"])]},
                    "criticality": _string_set(c.value for c in CriticalityLevel),
                    "passivated": {"oneOf": [{"type": "boolean"}, {"type": "array", "items": {"type": "boolean"}}]},
                    "regimes": _string_set(r.value for r in AttitudeRegime),
                    "grapple_feature": {"oneOf": [{"type": "boolean"}, {"type": "array", "items": {"type": "boolean"}}]},
                    "material": _string_set(m.value.lower() for m in InterfaceMaterial),
                    "clearance": _string_set(c.value for c in ClearanceClass),
                },
            },
        },
        "thresholds": {"type": "object"},
    },
}


@dataclass(frozen=True)
class RuleConfig:
    rules: Tuple[CaptureRule, ...]
    thresholds: Mapping[str, Any]


def _json_path(path: Iterable[Any]) -> str:
    return "/".join(str(p) for p in path) or "$"


def _rule_from_config(doc: Mapping[str, Any]) -> CaptureRule:
    def as_set(key: str, convert) -> Optional[FrozenSet[Any]]:
        if key not in doc:
            return None
        value = doc[key]
        values = value if isinstance(value, list) else [value]
        return frozenset(convert(v) for v in values)

    return CaptureRule(
        name=doc["name"],
        object_type=as_set("object_type", lambda v: ObjectType.PAYLOAD if v == "PL" else ObjectType.ROCKET_BODY),
        criticality=as_set("criticality", CriticalityLevel),
        passivated=as_set("passivated", bool),
        regimes=as_set("regimes", AttitudeRegime),
        grapple_feature=as_set("grapple_feature", bool),
        material=as_set("material", lambda v: InterfaceMaterial(v.capitalize())),
        clearance=as_set("clearance", ClearanceClass),
    )


def load_rule_config(data: bytes) -> RuleConfig:
    """Parse and validate a rule document; the ``thresholds`` object is returned unapplied."""
    try:
        doc = json.loads(data.decode("utf-8") if isinstance(data, bytes) else data)
    except (UnicodeDecodeError, json.JSONDecodeError) as exc:
        raise SchemaViolation("$", f"not a JSON document: {exc}") from exc

    validator = jsonschema.Draft7Validator(RULE_CONFIG_SCHEMA)
    errors = sorted(validator.iter_errors(doc), key=lambda e: [str(p) for p in e.absolute_path])
    if errors:
        first = errors[0]
        raise SchemaViolation(_json_path(first.absolute_path), first.message)

    rules: List[CaptureRule] = []
    seen = set()
    for rule_doc in doc["rules"]:
        if rule_doc["name"] in seen:
            raise DuplicateRuleName(rule_doc["name"])
        seen.add(rule_doc["name"])
        rules.append(_rule_from_config(rule_doc))
    logger.debug("loaded %d capture rule(s)", len(rules))
    return RuleConfig(tuple(rules), doc.get("thresholds", {}))


def load_rules(data: bytes) -> List[CaptureRule]:
    return list(load_rule_config(data).rules)


def rules_document(rules: Sequence[CaptureRule], thresholds: Optional[ThresholdConfig] = None) -> str:
    doc: Dict[str, Any] = {"rules": [rule.to_config() for rule in rules]}
    if thresholds is not None:
        doc["thresholds"] = thresholds.to_dict()
    return json.dumps(doc, indent=2) + "\n"


def default_rules_bytes() -> bytes:
    """The shipped rule file, ``data/default_rules.json``."""
    return resources.files("debris_triage").joinpath("data/default_rules.json").read_bytes()


__all__ = [
    "AttitudeRegime",
    "ClearanceClass",
    "UncooperativenessProfile",
    "CaptureRule",
    "SlotTrace",
    "RuleTrace",
    "ClassificationResult",
    "RuleConfig",
    "SLOTS",
    "RULE_CONFIG_SCHEMA",
    "attitude_regime",
    "clearance_class",
    "profile",
    "default_rules",
    "classify",
    "explain",
    "load_rule_config",
    "load_rules",
    "rules_document",
    "default_rules_bytes",
]
