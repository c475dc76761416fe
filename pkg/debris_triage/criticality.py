"""FMECA breakup criticality: severity (SN), probability (PN), criticality number and level."""
from __future__ import annotations

from dataclasses import dataclass
from enum import Enum
import logging
import math
from typing import Dict, FrozenSet, Iterable, Optional, Tuple

from .catalog import DebrisObject, ObjectType, PropellantClass, orbit_age_years
from .config import DEFAULT_THRESHOLDS, ThresholdConfig
from .errors import OutOfRange
from .survival import BreakupClass, CohortEstimator

logger = logging.getLogger(__name__)

SEVERITY_NAMES = {4: "Catastrophic", 3: "Critical", 2: "Major", 1: "Negligible"}

# Severity rows; {age} is filled with the configured fresh-age threshold.
ROW_RB_FRESH = "Propulsion | All propellants | >=200 fragments | non-passivated RB, orbit age <= {age} years"
ROW_RB_HYPERGOLIC = "Propulsion | Hypergolic | 79.5 fragments | non-passivated RB, orbit age > {age} years"
ROW_RB_CRYOGENIC = "Propulsion | Cryogenic | 7.5 fragments | non-passivated RB, orbit age > {age} years"
ROW_RB_PETROLEUM_SOLID = "Propulsion | Petroleum & Solid | 2.5 fragments | non-passivated RB, orbit age > {age} years"
ROW_RB_PASSIVATED = "Anomalous | N/A | 1 fragment | passivated RB"
ROW_RB_UNLISTED = "Propulsion | {propellant} (not tabulated) | non-passivated RB, orbit age > {age} years"
ROW_RB_NO_PROPELLANT = "No propulsion system | non-passivated RB, orbit age > {age} years"
ROW_PL_ACTIVE = "Anomalous & Electrical | non-passivated payload | major"
ROW_PL_PASSIVATED = "Anomalous, Collision & Unknown | passivated payload | major"


class CriticalityLevel(str, Enum):
    LOW = "low"
    MEDIUM = "medium"
    HIGH = "high"

    @property
    def label(self) -> str:
        return self.value.capitalize()


@dataclass(frozen=True)
class CriticalityAssessment:
    cospar_id: str
    sn: int
    pn: int
    cn: int
    level: CriticalityLevel
    probability: float
    age_years: float
    rationale: Tuple[str, ...] = ()

    def __post_init__(self) -> None:
        if self.cn != self.sn * self.pn:
            raise ValueError(f"cn {self.cn} != sn {self.sn} * pn {self.pn}")

    def to_row(self) -> Dict[str, object]:
        return {"cospar_id": self.cospar_id, "SN": self.sn, "PN": self.pn, "CN": self.cn, "level": self.level.label}


def worst_breakup_classes(obj: DebrisObject) -> FrozenSet[BreakupClass]:
    """Breakup classes whose probability drive PN for this object."""
    if obj.object_type is ObjectType.ROCKET_BODY:
        return frozenset({BreakupClass.ANOMALOUS} if obj.passivated else {BreakupClass.PROPULSION})
    if obj.passivated:
        return frozenset({BreakupClass.ANOMALOUS, BreakupClass.COLLISION, BreakupClass.UNKNOWN})
    return frozenset({BreakupClass.ANOMALOUS, BreakupClass.ELECTRICAL})


def severity_number(obj: DebrisObject, age_years: float, cfg: ThresholdConfig = DEFAULT_THRESHOLDS) -> Tuple[int, str]:
    """Return (SN, severity row) for the object's worst fragmentation event."""
    if not math.isfinite(age_years) or age_years < 0:
        raise OutOfRange("age_years", age_years)

    if obj.object_type is ObjectType.PAYLOAD:
        return 2, ROW_PL_PASSIVATED if obj.passivated else ROW_PL_ACTIVE
    if obj.passivated:
        return 1, ROW_RB_PASSIVATED

    limit = cfg.rb_fresh_age_years
    if age_years <= limit:
        return 4, ROW_RB_FRESH.format(age=limit)

    propellant = obj.propellant
    if propellant is PropellantClass.HYPERGOLIC:
        return 3, ROW_RB_HYPERGOLIC.format(age=limit)
    if propellant is PropellantClass.CRYOGENIC:
        return 2, ROW_RB_CRYOGENIC.format(age=limit)
    if propellant in (PropellantClass.PETROLEUM, PropellantClass.SOLID):
        return 1, ROW_RB_PETROLEUM_SOLID.format(age=limit)
    if propellant is PropellantClass.NO_PROPELLANT:
        logger.info("%s: no propellant, severity fallback SN %d", obj.id, cfg.no_propellant_sn)
        return cfg.no_propellant_sn, ROW_RB_NO_PROPELLANT.format(age=limit)
    logger.info("%s: %s propellant not tabulated, severity fallback SN %d", obj.id, propellant.value, cfg.aged_unlisted_propellant_sn)
    return cfg.aged_unlisted_propellant_sn, ROW_RB_UNLISTED.format(propellant=propellant.value, age=limit)


def probability_number(p: float, cfg: ThresholdConfig = DEFAULT_THRESHOLDS) -> int:
    """Smallest PN whose (inclusive) upper probability bound holds ``p``."""
    if not isinstance(p, (int, float)) or not math.isfinite(p) or not 0 <= p <= 1:
        raise OutOfRange("probability", p)
    for bound, pn in cfg.pn_limits:
        if p <= bound:
            return pn
    raise OutOfRange("probability", p)


def probability_bracket(p: float, cfg: ThresholdConfig = DEFAULT_THRESHOLDS) -> str:
    pn = probability_number(p, cfg)
    lower = 0.0
    for bound, number in cfg.pn_limits:
        if number == pn:
            upper = "inf" if math.isinf(bound) else f"{bound:g}"
            opener = "[" if lower == 0 else "("
            return f"p = {p:.3g} in {opener}{lower:g}, {upper}] -> PN {pn}"
        lower = bound
    return f"p = {p:.3g} -> PN {pn}"


CRITICALITY_MATRIX: Dict[Tuple[int, int], int] = {(sn, pn): sn * pn for sn in range(1, 5) for pn in range(1, 5)}
CRITICALITY_NUMBERS = (1, 2, 3, 4, 6, 8, 9, 12, 16)


def criticality_number(sn: int, pn: int) -> int:
    if sn not in (1, 2, 3, 4):
        raise OutOfRange("SN", sn)
    if pn not in (1, 2, 3, 4):
        raise OutOfRange("PN", pn)
    return CRITICALITY_MATRIX[(sn, pn)]


def criticality_level(sn: int, cn: int) -> CriticalityLevel:
    """High if SN = 4 or CN >= 8, else Medium if CN = 6, else Low."""
    if sn == 4 or cn >= 8:
        return CriticalityLevel.HIGH
    if cn == 6:
        return CriticalityLevel.MEDIUM
    return CriticalityLevel.LOW


def assess(
    obj: DebrisObject,
    probability: float,
    cfg: ThresholdConfig = DEFAULT_THRESHOLDS,
    *,
    age_years: Optional[float] = None,
    notes: Iterable[str] = (),
) -> CriticalityAssessment:
    """Compose SN, PN, CN and level; the age defaults to the orbit age at the window end."""
    if age_years is None:
        age_years = orbit_age_years(obj.launch_epoch, cfg.window_end)
    sn, row = severity_number(obj, age_years, cfg)
    pn = probability_number(probability, cfg)
    cn = criticality_number(sn, pn)
    level = criticality_level(sn, cn)
    rationale = (
        f"severity: {row} -> SN {sn} ({SEVERITY_NAMES[sn]})",
        f"probability: {probability_bracket(probability, cfg)}",
        f"criticality: CN = {sn} x {pn} = {cn} -> {level.label}",
        *notes,
    )
    return CriticalityAssessment(obj.id, sn, pn, cn, level, probability, age_years, rationale)


@dataclass(frozen=True)
class GivenValues:
    """Per-object values carried as data instead of derived (example databases ship these)."""

    cospar_id: str
    orbit_age_years: Optional[float] = None
    breakup_probability: Optional[float] = None


def assess_object(
    obj: DebrisObject,
    cfg: ThresholdConfig = DEFAULT_THRESHOLDS,
    given: Optional[GivenValues] = None,
    estimator: Optional[CohortEstimator] = None,
) -> CriticalityAssessment:
    """Resolve age and probability for one object, then assess it.

    A given probability wins over a survival-derived one, and a given age over the age at the
    window end; both choices are noted in the rationale.
    """
    notes = []
    if given is not None and given.orbit_age_years is not None:
        age = given.orbit_age_years
        notes.append(f"age: given value {age:g} years used")
    else:
        age = orbit_age_years(obj.launch_epoch, cfg.window_end)
        notes.append(f"age: {age:.2f} years at window end {cfg.window_end.isoformat()}")

    targets = worst_breakup_classes(obj)
    derived = estimator.probability(obj, age, targets) if estimator is not None else None
    if given is not None and given.breakup_probability is not None:
        probability = given.breakup_probability
        suffix = f" (survival estimate {derived:.3g} overridden)" if derived is not None else ""
        notes.append(f"probability: given value {probability:g} used{suffix}")
    elif derived is not None:
        probability = derived
        classes = ", ".join(sorted(c.value for c in targets))
        notes.append(f"probability: product-limit estimate over {obj.object_type.code} breakups ({classes})")
    else:
        raise OutOfRange(f"{obj.id} breakup probability", None)

    return assess(obj, probability, cfg, age_years=age, notes=notes)


__all__ = [
    "CriticalityLevel",
    "CriticalityAssessment",
    "GivenValues",
    "CRITICALITY_MATRIX",
    "CRITICALITY_NUMBERS",
    "worst_breakup_classes",
    "severity_number",
    "probability_number",
    "probability_bracket",
    "criticality_number",
    "criticality_level",
    "assess",
    "assess_object",
]
