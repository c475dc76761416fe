"""Summary statistics over classification results, rendered as CSV, aligned text or JSON."""
from __future__ import annotations

from collections import Counter
import csv
from dataclasses import dataclass
from io import StringIO
from itertools import combinations
import json
import logging
from typing import Any, Dict, List, Mapping, Sequence, Tuple

import numpy as np

from .catalog import DebrisObject, ObjectType
from .classifier import AttitudeRegime, ClassificationResult, attitude_regime
from .config import DEFAULT_THRESHOLDS, ThresholdConfig
from .criticality import CRITICALITY_NUMBERS, CriticalityAssessment
from .errors import EmptyInput, IdMismatch

logger = logging.getLogger(__name__)

DEFAULT_PERCENTILES = (25.0, 75.0)


def median(values: Sequence[float]) -> float:
    """Middle value, or the mean of the two middle values for an even count."""
    if len(values) == 0:
        raise EmptyInput("median of an empty list")
    return float(np.median(np.asarray(values, dtype=float)))


def interpercentile(
    values: Sequence[float], lo_pct: float = DEFAULT_PERCENTILES[0], hi_pct: float = DEFAULT_PERCENTILES[1]
) -> Tuple[float, float]:
    """Percentiles by linear interpolation between closest ranks."""
    if len(values) == 0:
        raise EmptyInput("percentiles of an empty list")
    lo, hi = np.percentile(np.asarray(values, dtype=float), [lo_pct, hi_pct])
    return float(lo), float(hi)


@dataclass(frozen=True)
class ClassRow:
    method: str
    count: int
    median_cn: float
    median_pn: float
    median_sn: float
    median_rate_deg_s: float
    median_age_years: float


@dataclass(frozen=True)
class CohortRow:
    object_type: str
    count: int
    median_age_years: float
    age_range: Tuple[float, float]
    median_probability: float
    probability_range: Tuple[float, float]


@dataclass(frozen=True)
class SummaryReport:
    classes: List[ClassRow]
    by_object_type: Dict[str, Dict[str, int]]
    by_cn: Dict[str, Dict[int, int]]
    by_regime: Dict[str, Dict[str, int]]
    pairs: Dict[str, int]
    unclassified: List[str]
    cohorts: List[CohortRow]
    percentiles: Tuple[float, float] = DEFAULT_PERCENTILES
    n_objects: int = 0

    def to_dict(self) -> Dict[str, Any]:
        return {
            "n_objects": self.n_objects,
            "percentiles": list(self.percentiles),
            "classes": [row.__dict__ for row in self.classes],
            "by_object_type": self.by_object_type,
            "by_cn": {m: {str(k): v for k, v in counts.items()} for m, counts in self.by_cn.items()},
            "by_regime": self.by_regime,
            "pairs": self.pairs,
            "unclassified": self.unclassified,
            "cohorts": [
                {
                    "object_type": c.object_type,
                    "count": c.count,
                    "median_age_years": c.median_age_years,
                    "age_range": list(c.age_range),
                    "median_probability": c.median_probability,
                    "probability_range": list(c.probability_range),
                }
                for c in self.cohorts
            ],
        }


@dataclass(frozen=True)
class Distributions:
    by_object_type: Dict[str, Dict[str, int]]
    by_cn: Dict[str, Dict[int, int]]
    by_regime: Dict[str, Dict[str, int]]
    pairs: Dict[str, int]


def distributions(
    results: Sequence[ClassificationResult],
    assessments: Sequence[CriticalityAssessment],
    objects: Sequence[DebrisObject],
    cfg: ThresholdConfig = DEFAULT_THRESHOLDS,
) -> Distributions:
    """Per-method counts by object type, CN and attitude regime, plus multi-label pair counts."""
    by_assessment = {a.cospar_id: a for a in assessments}
    by_object = {o.id: o for o in objects}
    by_type: Dict[str, Dict[str, int]] = {}
    by_cn: Dict[str, Dict[int, int]] = {}
    by_regime: Dict[str, Dict[str, int]] = {}
    for method, group in _members(results).items():
        type_counts = Counter(by_object[i].object_type.code for i in group)
        by_type[method] = {code: type_counts.get(code, 0) for code in ("PL", "RB")}
        cn_counts = Counter(by_assessment[i].cn for i in group)
        by_cn[method] = {cn: cn_counts.get(cn, 0) for cn in CRITICALITY_NUMBERS}
        regime_counts = Counter(attitude_regime(by_object[i].angular_rate_deg_s, cfg) for i in group)
        by_regime[method] = {r.label: regime_counts.get(r, 0) for r in AttitudeRegime}

    pair_counts: Counter = Counter()
    for result in results:
        for pair in combinations(sorted(result.matched), 2):
            pair_counts["+".join(pair)] += 1
    return Distributions(by_type, by_cn, by_regime, dict(sorted(pair_counts.items())))


def cohort_summary(
    assessments: Sequence[CriticalityAssessment],
    objects: Sequence[DebrisObject],
    percentiles: Tuple[float, float] = DEFAULT_PERCENTILES,
) -> List[CohortRow]:
    """Median orbit age and breakup probability per object type, with interpercentile ranges."""
    by_assessment = {a.cospar_id: a for a in assessments}
    cohorts = []
    for object_type in ObjectType:
        group = [by_assessment[o.id] for o in sorted(objects, key=lambda o: o.id) if o.object_type is object_type]
        if not group:
            continue
        ages = [x.age_years for x in group]
        probabilities = [x.probability for x in group]
        cohorts.append(
            CohortRow(
                object_type=object_type.code,
                count=len(group),
                median_age_years=median(ages),
                age_range=interpercentile(ages, *percentiles),
                median_probability=median(probabilities),
                probability_range=interpercentile(probabilities, *percentiles),
            )
        )
    return cohorts


def _members(results: Sequence[ClassificationResult]) -> Dict[str, List[str]]:
    """Method name -> ids of the objects it matched, both sorted."""
    members: Dict[str, List[str]] = {}
    for result in sorted(results, key=lambda r: r.cospar_id):
        for method in sorted(result.matched):
            members.setdefault(method, []).append(result.cospar_id)
    return dict(sorted(members.items()))


def summarize(
    results: Sequence[ClassificationResult],
    assessments: Sequence[CriticalityAssessment],
    objects: Sequence[DebrisObject],
    cfg: ThresholdConfig = DEFAULT_THRESHOLDS,
    percentiles: Tuple[float, float] = DEFAULT_PERCENTILES,
) -> SummaryReport:
    """Per-method medians (objects count once per matched method) plus the breakdowns."""
    by_result = {r.cospar_id: r for r in results}
    by_assessment = {a.cospar_id: a for a in assessments}
    by_object = {o.id: o for o in objects}
    ids = set(by_result) | set(by_assessment) | set(by_object)
    missing = [i for i in ids if i not in by_result or i not in by_assessment or i not in by_object]
    if missing:
        raise IdMismatch(missing)

    classes: List[ClassRow] = []
    for method, group in _members(results).items():
        a = [by_assessment[i] for i in group]
        o = [by_object[i] for i in group]
        classes.append(
            ClassRow(
                method=method,
                count=len(group),
                median_cn=median([x.cn for x in a]),
                median_pn=median([x.pn for x in a]),
                median_sn=median([x.sn for x in a]),
                median_rate_deg_s=median([x.angular_rate_deg_s for x in o]),
                median_age_years=median([x.age_years for x in a]),
            )
        )

    dist = distributions(results, assessments, objects, cfg)
    unclassified = sorted(i for i in ids if by_result[i].unclassified)
    logger.info("summarised %d object(s) into %d method class(es)", len(ids), len(classes))
    return SummaryReport(
        classes=classes,
        by_object_type=dist.by_object_type,
        by_cn=dist.by_cn,
        by_regime=dist.by_regime,
        pairs=dist.pairs,
        unclassified=unclassified,
        cohorts=cohort_summary(assessments, objects, percentiles),
        percentiles=percentiles,
        n_objects=len(ids),
    )


def fmt(value: Any) -> str:
    if isinstance(value, float):
        return format(value, ".10g")
    return str(value)


CLASS_HEADER = ("method", "count", "median_cn", "median_pn", "median_sn", "median_rate_deg_s", "median_age_years")


def _class_rows(report: SummaryReport) -> List[List[str]]:
    return [
        [r.method, fmt(r.count), fmt(r.median_cn), fmt(r.median_pn), fmt(r.median_sn), fmt(r.median_rate_deg_s), fmt(r.median_age_years)]
        for r in report.classes
    ]


def _breakdown_rows(counts: Mapping[str, Mapping[Any, int]], keys: Sequence[Any]) -> List[List[str]]:
    return [[method] + [fmt(counts[method][k]) for k in keys] for method in sorted(counts)]


def _cohort_header(report: SummaryReport) -> List[str]:
    lo, hi = (fmt(p) for p in report.percentiles)
    return [
        "object_type",
        "count",
        "median_age_years",
        f"age_p{lo}",
        f"age_p{hi}",
        "median_probability",
        f"probability_p{lo}",
        f"probability_p{hi}",
    ]


def _cohort_rows(report: SummaryReport) -> List[List[str]]:
    return [
        [c.object_type, fmt(c.count), fmt(c.median_age_years), fmt(c.age_range[0]), fmt(c.age_range[1]),
         fmt(c.median_probability), fmt(c.probability_range[0]), fmt(c.probability_range[1])]
        for c in report.cohorts
    ]


def report_tables(report: SummaryReport) -> Dict[str, Tuple[List[str], List[List[str]]]]:
    """Named (header, rows) tables; the CSV and text renderers share these."""
    regimes = [r.label for r in AttitudeRegime]
    return {
        "classes": (list(CLASS_HEADER), _class_rows(report)),
        "by_object_type": (["method", "PL", "RB"], _breakdown_rows(report.by_object_type, ["PL", "RB"])),
        "by_cn": (["method"] + [f"CN{cn}" for cn in CRITICALITY_NUMBERS], _breakdown_rows(report.by_cn, CRITICALITY_NUMBERS)),
        "by_regime": (["method"] + regimes, _breakdown_rows(report.by_regime, regimes)),
        "pairs": (["methods", "count"], [[k, fmt(v)] for k, v in report.pairs.items()]),
        "cohorts": (_cohort_header(report), _cohort_rows(report)),
    }


def to_csv_files(report: SummaryReport) -> Dict[str, str]:
    """One CSV document per table, keyed by file name."""
    files = {}
    for name, (header, rows) in report_tables(report).items():
        buf = StringIO()
        writer = csv.writer(buf, lineterminator="\n")
        writer.writerow(header)
        writer.writerows(rows)
        files[f"{name}.csv"] = buf.getvalue()
    return files


def render_csv(report: SummaryReport) -> str:
    return "\n".join(f"# {name}\n{text}" for name, text in to_csv_files(report).items())


def _aligned(header: Sequence[str], rows: Sequence[Sequence[str]]) -> List[str]:
    widths = [max(len(str(cell)) for cell in column) for column in zip(header, *rows)]
    lines = ["  ".join(h.ljust(w) for h, w in zip(header, widths)).rstrip()]
    lines.append("  ".join("-" * w for w in widths))
    lines.extend("  ".join(c.ljust(w) for c, w in zip(row, widths)).rstrip() for row in rows)
    return lines


def render_table(report: SummaryReport) -> str:
    lo, hi = (fmt(p) for p in report.percentiles)
    lines = [f"{report.n_objects} object(s); medians, interpercentile range p{lo}-p{hi}"]
    titles = {
        "classes": "Capture methods (medians)",
        "by_object_type": "By object type",
        "by_cn": "By criticality number",
        "by_regime": "By attitude regime",
        "pairs": "Multi-label pairs",
        "cohorts": "Cohorts",
    }
    for name, (header, rows) in report_tables(report).items():
        lines += ["", titles[name]]
        lines += _aligned(header, rows) if rows else ["(none)"]
    if report.unclassified:
        lines += ["", f"Unclassified: {', '.join(report.unclassified)}"]
    return "\n".join(lines) + "\n"


def render_json(report: SummaryReport) -> str:
    return json.dumps(report.to_dict(), indent=2) + "\n"


__all__ = [
    "DEFAULT_PERCENTILES",
    "ClassRow",
    "CohortRow",
    "SummaryReport",
    "Distributions",
    "median",
    "interpercentile",
    "summarize",
    "distributions",
    "cohort_summary",
    "report_tables",
    "to_csv_files",
    "render_csv",
    "render_table",
    "render_json",
]
