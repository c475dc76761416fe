"""Stage plumbing shared by the CLI: input loading, assessment and batched classification."""
from __future__ import annotations

from concurrent.futures import ThreadPoolExecutor
import csv
from dataclasses import dataclass, field
from io import StringIO
import json
import logging
from typing import Dict, Generator, Iterable, List, Optional, Sequence, Tuple, TypeVar

from .catalog import DebrisObject
from .classifier import CaptureRule, ClassificationResult, classify, profile
from .config import DEFAULT_BATCH_SIZE, DEFAULT_THRESHOLDS, ThresholdConfig
from .criticality import CriticalityAssessment, GivenValues, assess_object
from .errors import OutOfRange
from .ingest import Diagnostic
from .survival import CohortEstimator

logger = logging.getLogger(__name__)

T = TypeVar("T")


def batched(items: Sequence[T], size: int) -> Generator[List[T], None, None]:
    if size < 1:
        raise OutOfRange("batch size", size)
    for start in range(0, len(items), size):
        yield list(items[start : start + size])


@dataclass
class Inputs:
    """Everything the assess/classify/report stages read."""

    objects: List[DebrisObject]
    given: Dict[str, GivenValues] = field(default_factory=dict)
    estimator: Optional[CohortEstimator] = None
    diagnostics: List[Diagnostic] = field(default_factory=list)


def assess_all(inputs: Inputs, cfg: ThresholdConfig = DEFAULT_THRESHOLDS) -> List[CriticalityAssessment]:
    return [assess_object(obj, cfg, inputs.given.get(obj.id), inputs.estimator) for obj in inputs.objects]


def _classify_one(
    item: Tuple[DebrisObject, CriticalityAssessment], rules: Sequence[CaptureRule], cfg: ThresholdConfig
) -> ClassificationResult:
    obj, assessment = item
    return classify(profile(obj, assessment, cfg), rules)


def classify_batches(
    objects: Sequence[DebrisObject],
    assessments: Sequence[CriticalityAssessment],
    rules: Sequence[CaptureRule],
    cfg: ThresholdConfig = DEFAULT_THRESHOLDS,
    batch_size: int = DEFAULT_BATCH_SIZE,
    workers: int = 1,
) -> Generator[List[ClassificationResult], None, None]:
    """Yield results one batch at a time, in input order; batches fan out over a thread pool."""
    items = list(zip(objects, assessments))
    if workers < 1:
        raise OutOfRange("workers", workers)

    executor = ThreadPoolExecutor(max_workers=workers, thread_name_prefix="classify") if workers > 1 else None
    try:
        for batch_no, batch in enumerate(batched(items, batch_size), start=1):
            logger.debug("batch %d: %d object(s)", batch_no, len(batch))
            if executor is None:
                yield [_classify_one(item, rules, cfg) for item in batch]
            else:
                yield list(executor.map(lambda item: _classify_one(item, rules, cfg), batch))
    finally:
        if executor is not None:
            executor.shutdown(wait=True)


def classify_all(
    objects: Sequence[DebrisObject],
    assessments: Sequence[CriticalityAssessment],
    rules: Sequence[CaptureRule],
    cfg: ThresholdConfig = DEFAULT_THRESHOLDS,
    batch_size: int = DEFAULT_BATCH_SIZE,
    workers: int = 1,
) -> List[ClassificationResult]:
    results: List[ClassificationResult] = []
    for batch in classify_batches(objects, assessments, rules, cfg, batch_size, workers):
        results.extend(batch)
    return results


def result_lines(results: Iterable[ClassificationResult]) -> str:
    return "".join(json.dumps(r.to_record(), separators=(",", ":")) + "\n" for r in results)


def assessment_csv(assessments: Iterable[CriticalityAssessment], verbose: bool = False) -> str:
    buf = StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(["cospar_id", "SN", "PN", "CN", "level"] + (["rationale"] if verbose else []))
    for a in assessments:
        row = [a.cospar_id, a.sn, a.pn, a.cn, a.level.label]
        if verbose:
            row.append(" | ".join(a.rationale))
        writer.writerow(row)
    return buf.getvalue()


__all__ = [
    "Inputs",
    "batched",
    "assess_all",
    "classify_batches",
    "classify_all",
    "result_lines",
    "assessment_csv",
]
