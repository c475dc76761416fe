from __future__ import annotations

import time

import pytest

from conftest import make_object, rocket_body
from debris_triage.config import ThresholdConfig
from debris_triage.criticality import (
    CRITICALITY_NUMBERS,
    CriticalityLevel,
    GivenValues,
    assess,
    assess_object,
    criticality_level,
    criticality_number,
    probability_number,
    severity_number,
    worst_breakup_classes,
)
from debris_triage.errors import OutOfRange
from debris_triage.survival import BreakupClass

# Rows SN 4..1, columns PN 1..4.
MATRIX = [
    [4, 8, 12, 16],
    [3, 6, 9, 12],
    [2, 4, 6, 8],
    [1, 2, 3, 4],
]


def test_matrix_matches_published_table():
    for row, sn in zip(MATRIX, (4, 3, 2, 1)):
        assert [criticality_number(sn, pn) for pn in (1, 2, 3, 4)] == row
    values = {criticality_number(sn, pn) for sn in range(1, 5) for pn in range(1, 5)}
    assert values == set(CRITICALITY_NUMBERS)


def test_matrix_and_levels_under_a_millisecond():
    start = time.perf_counter()
    for sn in range(1, 5):
        for pn in range(1, 5):
            criticality_level(sn, criticality_number(sn, pn))
    assert time.perf_counter() - start < 1e-3


def test_levels_over_all_pairs():
    high = {(4, 1), (4, 2), (4, 3), (4, 4), (3, 3), (3, 4), (2, 4)}
    medium = {(3, 2), (2, 3)}
    for sn in range(1, 5):
        for pn in range(1, 5):
            level = criticality_level(sn, criticality_number(sn, pn))
            if (sn, pn) in high:
                assert level is CriticalityLevel.HIGH
            elif (sn, pn) in medium:
                assert level is CriticalityLevel.MEDIUM
            else:
                assert level is CriticalityLevel.LOW


@pytest.mark.parametrize("sn, pn", [(0, 1), (5, 1), (1, 0), (1, 5)])
def test_criticality_number_range(sn, pn):
    with pytest.raises(OutOfRange):
        criticality_number(sn, pn)


@pytest.mark.parametrize(
    "p, pn",
    [(0, 1), (1e-4, 1), (1e-4 + 1e-12, 2), (1e-2, 2), (1e-2 + 1e-12, 3), (1e-1, 3), (1e-1 + 1e-12, 4), (0.5, 4), (1.0, 4)],
)
def test_probability_number_boundaries(p, pn):
    assert probability_number(p) == pn


@pytest.mark.parametrize("p", [-0.01, 1.01, float("nan"), float("inf")])
def test_probability_number_range(p):
    with pytest.raises(OutOfRange):
        probability_number(p)


def test_rocket_body_severity_rows():
    assert severity_number(rocket_body(propellant="Hypergolic"), 1.05)[0] == 4
    assert severity_number(rocket_body(propellant="Hypergolic"), 1.05 + 1e-9)[0] == 3
    assert severity_number(rocket_body(propellant="Cryogenic"), 10.0)[0] == 2
    assert severity_number(rocket_body(propellant="Petroleum"), 10.0)[0] == 1
    assert severity_number(rocket_body(propellant="Solid"), 10.0)[0] == 1
    assert severity_number(rocket_body(propellant="Solid"), 0.5)[0] == 4


def test_rocket_body_fallbacks():
    assert severity_number(rocket_body(propellant="Hybrid"), 10.0)[0] == 3
    assert severity_number(rocket_body(propellant="Unknown"), 10.0)[0] == 3
    assert severity_number(rocket_body(propellant="NoPropellant"), 10.0)[0] == 1
    cfg = ThresholdConfig(aged_unlisted_propellant_sn=2)
    assert severity_number(rocket_body(propellant="Other"), 10.0, cfg)[0] == 2
    passivated = rocket_body(propellant="Hypergolic", passivated="true", passivation_documented=True)
    assert severity_number(passivated, 0.5)[0] == 1


def test_payload_severity_is_major():
    assert severity_number(make_object(), 0.1) == (2, severity_number(make_object(), 30.0)[1])
    passivated = make_object(passivated="true", passivation_documented=True)
    assert severity_number(passivated, 30.0)[0] == 2
    with pytest.raises(OutOfRange):
        severity_number(make_object(), -1.0)


def test_fresh_age_threshold_is_configurable():
    cfg = ThresholdConfig(rb_fresh_age_years=2.0)
    assert severity_number(rocket_body(), 1.5, cfg)[0] == 4


def test_worst_breakup_classes():
    assert worst_breakup_classes(rocket_body()) == {BreakupClass.PROPULSION}
    assert worst_breakup_classes(make_object()) == {BreakupClass.ANOMALOUS, BreakupClass.ELECTRICAL}
    passivated = make_object(passivated="true", passivation_documented=True)
    assert BreakupClass.COLLISION in worst_breakup_classes(passivated)


def test_assess_composes_numbers_and_rationale():
    a = assess(rocket_body(), 2.55e-2, age_years=41.96)
    assert (a.sn, a.pn, a.cn, a.level) == (1, 3, 3, CriticalityLevel.LOW)
    assert a.rationale[0].startswith("severity: Propulsion | Petroleum & Solid")
    assert a.rationale[2] == "criticality: CN = 1 x 3 = 3 -> Low"
    assert a.to_row() == {"cospar_id": "1978-018B", "SN": 1, "PN": 3, "CN": 3, "level": "Low"}


def test_assess_defaults_age_to_window_end():
    a = assess(make_object(), 3.05e-2, ThresholdConfig())
    assert a.age_years == pytest.approx(10665 / 365.25)
    assert (a.sn, a.pn, a.cn, a.level) == (2, 3, 6, CriticalityLevel.MEDIUM)


def test_fixture_assessments(fixture_objects, fixture_given):
    cns = {o.id: assess_object(o, ThresholdConfig(), fixture_given[o.id]).cn for o in fixture_objects}
    assert cns == {
        "1978-018B": 3,
        "1978-121A": 6,
        "1989-001B": 6,
        "1990-005H": 3,
        "1990-045A": 6,
        "1991-084C": 6,
        "1992-052A": 6,
        "1993-061A": 6,
        "1994-021A": 6,
        "1994-021B": 6,
    }


def test_assess_object_needs_a_probability():
    with pytest.raises(OutOfRange):
        assess_object(make_object())
    partial = GivenValues("1990-045A", orbit_age_years=29.71)
    with pytest.raises(OutOfRange):
        assess_object(make_object(), given=partial)


def test_given_values_win():
    given = GivenValues("1990-045A", orbit_age_years=29.71, breakup_probability=0.5)
    a = assess_object(make_object(), given=given)
    assert (a.age_years, a.probability, a.pn) == (29.71, 0.5, 4)
    assert any("given value 0.5" in note for note in a.rationale)
