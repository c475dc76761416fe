from __future__ import annotations

from datetime import date
import logging
from pathlib import Path
from typing import Any, Dict, List

import pytest

from debris_triage.catalog import DebrisObject, validate_object
from debris_triage.criticality import GivenValues
from debris_triage.fileio import read_bytes
from debris_triage.ingest import merge, parse_annotations, parse_given_values, parse_structured_document

FIXTURES = Path(__file__).resolve().parent.parent / "fixtures"

FIXTURE_IDS = [
    "1978-018B",
    "1978-121A",
    "1989-001B",
    "1990-005H",
    "1990-045A",
    "1991-084C",
    "1992-052A",
    "1993-061A",
    "1994-021A",
    "1994-021B",
]


def raw_object(**overrides: Any) -> Dict[str, Any]:
    raw: Dict[str, Any] = {
        "cospar_id": "1990-045A",
        "name": "Uragan",
        "object_type": "Payload",
        "orbit_class": "MEO",
        "launch_epoch": "1990-05-19",
        "reentry_epoch": None,
        "deactivation_epoch": None,
        "failure_epoch": None,
        "failure_kind": None,
        "passivated": "false",
        "passivation_documented": False,
        "propellant": "Unknown",
        "platform_name": "Uragan Block IIv",
        "mass_kg": 1250.0,
        "angular_rate_deg_s": 38.96,
        "grapple_feature": True,
        "interface_material": "Isotropic",
        "interface_clearance_m2": 0.2827,
    }
    raw.update(overrides)
    return raw


def make_object(**overrides: Any) -> DebrisObject:
    return validate_object(raw_object(**overrides))


def rocket_body(**overrides: Any) -> DebrisObject:
    fields = {"cospar_id": "1978-018B", "object_type": "RocketBody", "launch_epoch": "1978-02-08", "propellant": "Petroleum"}
    fields.update(overrides)
    return make_object(**fields)


@pytest.fixture(autouse=True)
def _reset_logging():
    yield
    root = logging.getLogger()
    for handler in root.handlers[:]:
        root.removeHandler(handler)


@pytest.fixture
def fixture_dir() -> Path:
    return FIXTURES


@pytest.fixture
def fixture_objects() -> List[DebrisObject]:
    page = parse_structured_document(read_bytes(FIXTURES / "catalog.json"))
    annotations = parse_annotations(read_bytes(FIXTURES / "annotations.csv"))
    return merge(page.records, annotations.records).objects


@pytest.fixture
def fixture_given() -> Dict[str, GivenValues]:
    return {g.cospar_id: g for g in parse_given_values(read_bytes(FIXTURES / "given.csv")).records}


@pytest.fixture
def window_end() -> date:
    return date(2019, 7, 31)
