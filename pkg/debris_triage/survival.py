"""Product-limit (Kaplan-Meier) estimation of breakup probability from right-censored histories.

Ties follow the usual product-limit convention: breakups at time t are removed
from the risk set after censorings at t have been counted as still at risk.
"""
from __future__ import annotations

from bisect import bisect_right
from collections import Counter
from dataclasses import dataclass, replace
from datetime import date
from enum import Enum
import logging
import math
from typing import Dict, FrozenSet, Iterable, List, Optional, Sequence, Tuple

import numpy as np
from scipy.stats import norm

from .catalog import CosparId, DebrisObject, ObjectType, orbit_age_years
from .config import DEFAULT_SURVIVAL, SurvivalConfig
from .errors import EmptyInput, EventAfterWindow, OutOfRange, UnknownSubject

logger = logging.getLogger(__name__)

CSV_HEADER = "time_years,survival,ci_low,ci_high,at_risk,events"


class BreakupClass(str, Enum):
    PROPULSION = "Propulsion"
    ANOMALOUS = "Anomalous"
    ELECTRICAL = "Electrical"
    COLLISION = "Collision"
    UNKNOWN = "Unknown"


class CensorCause(str, Enum):
    REENTERED = "Reentered"
    WINDOW_END = "WindowEnd"
    UNKNOWN_REENTRY = "UnknownReentry"
    OTHER_BREAKUP = "OtherBreakup"


class RawEventType(str, Enum):
    BREAKUP = "breakup"
    REENTRY = "reentry"
    REENTRY_UNKNOWN = "reentry_unknown"


@dataclass(frozen=True)
class EventKind:
    """Either a breakup of a given class or a censoring with its cause."""

    breakup_class: Optional[BreakupClass] = None
    censor_cause: Optional[CensorCause] = None

    def __post_init__(self) -> None:
        if (self.breakup_class is None) == (self.censor_cause is None):
            raise ValueError("EventKind needs exactly one of breakup_class or censor_cause")

    @classmethod
    def breakup(cls, breakup_class: BreakupClass) -> "EventKind":
        return cls(breakup_class=breakup_class)

    @classmethod
    def censored(cls, cause: CensorCause) -> "EventKind":
        return cls(censor_cause=cause)

    @property
    def is_breakup(self) -> bool:
        return self.breakup_class is not None

    def label(self) -> str:
        if self.breakup_class is not None:
            return f"Breakup({self.breakup_class.value})"
        return f"Censored({self.censor_cause.value})"  # type: ignore[union-attr]


@dataclass(frozen=True)
class EventRecord:
    """One subject's observation: orbit age at its first qualifying event."""

    subject_id: CosparId
    time_years: float
    kind: EventKind

    def __post_init__(self) -> None:
        if not math.isfinite(self.time_years) or self.time_years < 0:
            raise OutOfRange("time_years", self.time_years)


@dataclass(frozen=True)
class RawEvent:
    """An observation as it appears in an event history file."""

    cospar_id: str
    event: RawEventType
    epoch: Optional[date] = None
    breakup_class: Optional[BreakupClass] = None


@dataclass(frozen=True)
class SurvivalStep:
    time_years: float
    survival: float
    ci_low: float
    ci_high: float
    at_risk: int
    events: int


@dataclass(frozen=True)
class SurvivalCurve:
    """Right-continuous step function S(t); only breakup times carry steps."""

    steps: Tuple[SurvivalStep, ...]
    n_subjects: int
    alpha: Optional[float] = None

    @property
    def times(self) -> List[float]:
        return [s.time_years for s in self.steps]

    def survival_at(self, t: float) -> float:
        index = bisect_right(self.times, t)
        return 1.0 if index == 0 else self.steps[index - 1].survival

    def band_at(self, t: float) -> Tuple[float, float]:
        """Confidence band at ``t``; [1, 1] before the first breakup."""
        index = bisect_right(self.times, t)
        if index == 0:
            return 1.0, 1.0
        step = self.steps[index - 1]
        return step.ci_low, step.ci_high

    def to_csv(self) -> str:
        lines = [CSV_HEADER]
        for s in self.steps:
            lines.append(f"{s.time_years!r},{s.survival!r},{s.ci_low!r},{s.ci_high!r},{s.at_risk},{s.events}")
        return "\n".join(lines) + "\n"


def build_cohort(
    objects: Sequence[DebrisObject],
    events: Iterable[RawEvent],
    target_classes: Iterable[BreakupClass],
    window_end: date,
) -> List[EventRecord]:
    """Reduce each subject's history to its earliest qualifying event, one record per subject.

    Breakups outside ``target_classes`` censor the subject (OtherBreakup). Subjects still in
    orbit at ``window_end`` censor there; a documented but undated reentry censors there too,
    tagged UnknownReentry.
    """
    targets: FrozenSet[BreakupClass] = frozenset(target_classes)
    by_id: Dict[str, DebrisObject] = {obj.id: obj for obj in objects}
    # (epoch, tie rank, kind): target breakups win ties, then other breakups, then reentries.
    candidates: Dict[str, List[Tuple[date, int, EventKind]]] = {oid: [] for oid in by_id}
    unknown_reentry = set()

    for obj in objects:
        if obj.launch_epoch > window_end:
            raise EventAfterWindow(obj.id, obj.launch_epoch, window_end)
        if obj.reentry_epoch is not None and obj.reentry_epoch <= window_end:
            candidates[obj.id].append((obj.reentry_epoch, 2, EventKind.censored(CensorCause.REENTERED)))

    for raw in events:
        key = raw.cospar_id.strip()
        if key not in by_id:
            raise UnknownSubject(key)
        if raw.event is RawEventType.REENTRY_UNKNOWN:
            unknown_reentry.add(key)
            continue
        if raw.epoch is None:
            raise OutOfRange(f"{key} {raw.event.value} epoch", None)
        if raw.event is RawEventType.REENTRY:
            if raw.epoch <= window_end:
                candidates[key].append((raw.epoch, 2, EventKind.censored(CensorCause.REENTERED)))
            continue
        if raw.epoch > window_end:
            raise EventAfterWindow(key, raw.epoch, window_end)
        breakup_class = raw.breakup_class or BreakupClass.UNKNOWN
        if breakup_class in targets:
            candidates[key].append((raw.epoch, 0, EventKind.breakup(breakup_class)))
        else:
            candidates[key].append((raw.epoch, 1, EventKind.censored(CensorCause.OTHER_BREAKUP)))

    records: List[EventRecord] = []
    for oid in sorted(by_id):
        obj = by_id[oid]
        end_cause = CensorCause.UNKNOWN_REENTRY if oid in unknown_reentry else CensorCause.WINDOW_END
        options = candidates[oid] + [(window_end, 3, EventKind.censored(end_cause))]
        epoch, _, kind = min(options, key=lambda item: (item[0], item[1]))
        records.append(EventRecord(obj.cospar_id, orbit_age_years(obj.launch_epoch, epoch), kind))

    tally = Counter(r.kind.label() for r in records)
    logger.info("cohort of %d subject(s): %s", len(records), dict(sorted(tally.items())))
    return records


def kaplan_meier(records: Sequence[EventRecord]) -> SurvivalCurve:
    """Product-limit estimate over the distinct breakup times; bands are left degenerate."""
    if not records:
        raise EmptyInput("kaplan_meier needs at least one record")

    times = np.fromiter((r.time_years for r in records), dtype=float, count=len(records))
    observed = np.fromiter((r.kind.is_breakup for r in records), dtype=bool, count=len(records))

    event_times, deaths = np.unique(times[observed], return_counts=True)
    ordered = np.sort(times)
    # Subjects with time >= t are at risk at t, so censorings tied with t still count.
    at_risk = len(times) - np.searchsorted(ordered, event_times, side="left")
    survival = np.cumprod(1.0 - deaths / at_risk)

    steps = tuple(
        SurvivalStep(float(t), float(s), float(s), float(s), int(n), int(d))
        for t, s, n, d in zip(event_times, survival, at_risk, deaths)
    )
    return SurvivalCurve(steps=steps, n_subjects=len(records))


def normal_quantile(p: float) -> float:
    """Standard normal inverse CDF."""
    if not 0 < p < 1:
        raise OutOfRange("normal quantile probability", p)
    return float(norm.ppf(p))


def greenwood_ci(curve: SurvivalCurve, alpha: float = 0.05, method: str = "linear") -> SurvivalCurve:
    """Attach pointwise (1 - alpha) confidence bands from Greenwood's variance.

    Once a step empties its risk set (d = n) the estimate is 0 and the band is [0, S] = [0, 0]
    from there on.
    """
    if not 0 < alpha <= 1:
        raise OutOfRange("alpha", alpha)
    if not curve.steps:
        return replace(curve, alpha=alpha)

    z = 0.0 if alpha == 1 else normal_quantile(1.0 - alpha / 2.0)
    s = np.array([step.survival for step in curve.steps])
    n = np.array([step.at_risk for step in curve.steps], dtype=float)
    d = np.array([step.events for step in curve.steps], dtype=float)

    exhausted = np.cumsum(n == d) > 0
    with np.errstate(divide="ignore", invalid="ignore"):
        terms = np.where(n > d, d / (n * (n - d)), 0.0)
    greenwood_sum = np.cumsum(terms)

    if method == "linear":
        half_width = z * np.sqrt(s**2 * greenwood_sum)
        low, high = s - half_width, s + half_width
    elif method == "log-log":
        low, high = _log_log_bands(s, greenwood_sum, z)
    else:
        raise OutOfRange("ci_method", method)

    low = np.where(exhausted, 0.0, np.clip(low, 0.0, 1.0))
    high = np.where(exhausted, s, np.clip(high, 0.0, 1.0))
    # Clamping can not push a band across the estimate, but rounding can.
    low = np.minimum(low, s)
    high = np.maximum(high, s)

    steps = tuple(
        replace(step, ci_low=float(lo), ci_high=float(hi)) for step, lo, hi in zip(curve.steps, low, high)
    )
    return replace(curve, steps=steps, alpha=alpha)


def _log_log_bands(s: np.ndarray, greenwood_sum: np.ndarray, z: float) -> Tuple[np.ndarray, np.ndarray]:
    interior = (s > 0) & (s < 1)
    safe_s = np.where(interior, s, 0.5)
    sigma = np.sqrt(greenwood_sum) / np.abs(np.log(safe_s))
    low = np.where(interior, safe_s ** np.exp(z * sigma), s)
    high = np.where(interior, safe_s ** np.exp(-z * sigma), s)
    linear = z * np.sqrt(s**2 * greenwood_sum)
    low = np.where(interior, low, s - linear)
    high = np.where(interior, high, s + linear)
    return low, high


def estimate(records: Sequence[EventRecord], cfg: SurvivalConfig = DEFAULT_SURVIVAL) -> SurvivalCurve:
    """kaplan_meier followed by greenwood_ci using the configured band settings."""
    return greenwood_ci(kaplan_meier(records), cfg.alpha, cfg.ci_method)


def breakup_probability(curve: SurvivalCurve, age_years: float) -> float:
    """P(t) = 1 - S(t), with S right-continuous and held at its last value past the final step."""
    if not math.isfinite(age_years) or age_years < 0:
        raise OutOfRange("age_years", age_years)
    return 1.0 - curve.survival_at(age_years)


class CohortEstimator:
    """Breakup probabilities per object, from curves cached by (object type, target classes)."""

    def __init__(
        self,
        objects: Sequence[DebrisObject],
        events: Sequence[RawEvent],
        window_end: date,
        cfg: SurvivalConfig = DEFAULT_SURVIVAL,
    ) -> None:
        self.objects = list(objects)
        self.events = list(events)
        known = {obj.id for obj in self.objects}
        for raw in self.events:
            if raw.cospar_id.strip() not in known:
                raise UnknownSubject(raw.cospar_id.strip())
        self.window_end = window_end
        self.cfg = cfg
        self._curves: Dict[Tuple[ObjectType, FrozenSet[BreakupClass]], SurvivalCurve] = {}

    def curve_for(self, object_type: ObjectType, target_classes: Iterable[BreakupClass]) -> SurvivalCurve:
        key = (object_type, frozenset(target_classes))
        if key not in self._curves:
            members = [obj for obj in self.objects if obj.object_type is object_type]
            member_ids = {obj.id for obj in members}
            member_events = [e for e in self.events if e.cospar_id.strip() in member_ids]
            records = build_cohort(members, member_events, key[1], self.window_end)
            self._curves[key] = estimate(records, self.cfg)
            logger.debug(
                "estimated %s curve for %s over %d subject(s)",
                object_type.code,
                sorted(c.value for c in key[1]),
                len(records),
            )
        return self._curves[key]

    def probability(self, obj: DebrisObject, age_years: float, target_classes: Iterable[BreakupClass]) -> float:
        return breakup_probability(self.curve_for(obj.object_type, target_classes), age_years)


def probability_for(
    obj: DebrisObject,
    objects: Sequence[DebrisObject],
    events: Sequence[RawEvent],
    window_end: date,
    target_classes: Iterable[BreakupClass],
    age_years: float,
    cfg: SurvivalConfig = DEFAULT_SURVIVAL,
) -> Tuple[float, SurvivalCurve]:
    """One-off estimate over the object's type cohort; use CohortEstimator to reuse curves."""
    targets = frozenset(target_classes)
    curve = CohortEstimator(objects, events, window_end, cfg).curve_for(obj.object_type, targets)
    return breakup_probability(curve, age_years), curve


__all__ = [
    "CSV_HEADER",
    "BreakupClass",
    "CensorCause",
    "RawEventType",
    "EventKind",
    "EventRecord",
    "RawEvent",
    "SurvivalStep",
    "SurvivalCurve",
    "build_cohort",
    "kaplan_meier",
    "normal_quantile",
    "greenwood_ci",
    "estimate",
    "breakup_probability",
    "CohortEstimator",
    "probability_for",
]
