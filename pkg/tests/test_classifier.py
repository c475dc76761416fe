from __future__ import annotations

import json
import random
import time

import pytest

from conftest import make_object
from debris_triage.catalog import InterfaceMaterial, ObjectType
from debris_triage.classifier import (
    AttitudeRegime,
    CaptureRule,
    ClearanceClass,
    UncooperativenessProfile,
    attitude_regime,
    classify,
    clearance_class,
    default_rules,
    default_rules_bytes,
    explain,
    load_rule_config,
    load_rules,
    profile,
    rules_document,
)
from debris_triage.config import ThresholdConfig
from debris_triage.criticality import CriticalityLevel, assess, assess_object
from debris_triage.errors import DuplicateRuleName, EmptySlotSet, OutOfRange, SchemaViolation

EXPECTED_MATCHES = {
    "1978-018B": {"Electromagnetic_Based"},
    "1978-121A": {"Net_Based"},
    "1989-001B": {"Plume_Impingement"},
    "1990-005H": {"Manipulator_Based", "Net_Based"},
    "1990-045A": {"Plume_Impingement"},
    "1991-084C": {"Net_Based"},
    "1992-052A": {"Ablation_Based", "Plume_Impingement"},
    "1993-061A": {"Net_Based"},
    "1994-021A": {"Net_Based"},
    "1994-021B": {"Net_Based"},
}


def _profile(**overrides) -> UncooperativenessProfile:
    fields = dict(
        cospar_id="1990-045A",
        object_type=ObjectType.PAYLOAD,
        criticality=CriticalityLevel.LOW,
        passivated=False,
        regime=AttitudeRegime.STABLE,
        grapple_feature=True,
        material=InterfaceMaterial.ISOTROPIC,
        clearance=ClearanceClass.BROAD,
    )
    fields.update(overrides)
    return UncooperativenessProfile(**fields)


def _random_profile(rng: random.Random, **fixed) -> UncooperativenessProfile:
    fields = dict(
        cospar_id="2000-001A",
        object_type=rng.choice(list(ObjectType)),
        criticality=rng.choice(list(CriticalityLevel)),
        passivated=rng.random() < 0.5,
        regime=rng.choice(list(AttitudeRegime)),
        grapple_feature=rng.random() < 0.5,
        material=rng.choice(list(InterfaceMaterial)),
        clearance=rng.choice(list(ClearanceClass)),
    )
    fields.update(fixed)
    return UncooperativenessProfile(**fields)


@pytest.mark.parametrize(
    "omega, regime",
    [(0, "stable"), (4.999, "slow"), (5, "medium"), (17.999, "medium"), (18, "fast"), (67.8, "fast")],
)
def test_attitude_regime_boundaries(omega, regime):
    assert attitude_regime(omega) is AttitudeRegime(regime)


def test_attitude_regime_is_total():
    rng = random.Random(1)
    for _ in range(1000):
        assert isinstance(attitude_regime(rng.uniform(0, 100)), AttitudeRegime)
    with pytest.raises(OutOfRange):
        attitude_regime(-0.1)


@pytest.mark.parametrize("area, expected", [(0.2799, "narrow"), (0.28, "broad"), (0.2827, "broad")])
def test_clearance_boundaries(area, expected):
    assert clearance_class(area) is ClearanceClass(expected)


def test_thresholds_move_partitions():
    cfg = ThresholdConfig(slow_max_deg_s=3.0, medium_max_deg_s=10.0, clearance_broad_min_m2=0.5)
    assert attitude_regime(4.0, cfg) is AttitudeRegime.MEDIUM
    assert attitude_regime(12.0, cfg) is AttitudeRegime.FAST
    assert clearance_class(0.3, cfg) is ClearanceClass.NARROW


def test_fixture_classification(fixture_objects, fixture_given):
    cfg = ThresholdConfig()
    rules = default_rules()
    for obj in fixture_objects:
        assessment = assess_object(obj, cfg, fixture_given[obj.id])
        result = classify(profile(obj, assessment, cfg), rules)
        assert set(result.matched) == EXPECTED_MATCHES[obj.id], obj.id


def test_fixture_classification_within_a_second(fixture_objects, fixture_given):
    cfg = ThresholdConfig()
    start = time.perf_counter()
    rules = default_rules()
    for obj in fixture_objects:
        classify(profile(obj, assess_object(obj, cfg, fixture_given[obj.id]), cfg), rules)
    assert time.perf_counter() - start < 1.0


def test_fixture_metadata_agrees(fixture_dir):
    metadata = json.loads((fixture_dir / "metadata.json").read_text(encoding="utf-8"))
    assert {k: set(v) for k, v in metadata["expected_matches"].items()} == EXPECTED_MATCHES


def test_unclassified_profile_is_not_an_error():
    result = classify(_profile(criticality=CriticalityLevel.HIGH), default_rules())
    assert result.unclassified
    assert explain(result).startswith("1990-045A: Unclassified - no rule matched")


def test_trace_soundness():
    rng = random.Random(11)
    rules = default_rules()
    for _ in range(300):
        result = classify(_random_profile(rng), rules)
        assert len(result.traces) == len(rules)
        for trace in result.traces:
            assert (trace.rule in result.matched) == (len(trace.violated) == 0)


def test_manipulator_and_net_subsumption():
    rng = random.Random(5)
    rules = default_rules()
    for _ in range(300):
        p = _random_profile(
            rng,
            criticality=CriticalityLevel.LOW,
            regime=rng.choice([AttitudeRegime.STABLE, AttitudeRegime.SLOW, AttitudeRegime.MEDIUM]),
            grapple_feature=True,
        )
        assert {"Manipulator_Based", "Net_Based"} <= classify(p, rules).matched


def test_no_solution_never_co_matches_net():
    rng = random.Random(9)
    rules = default_rules()
    for _ in range(500):
        matched = classify(_random_profile(rng), rules).matched
        assert not {"No_Solution", "Net_Based"} <= matched


def test_rule_removal_and_permutation():
    rng = random.Random(13)
    rules = default_rules()
    for _ in range(100):
        p = _random_profile(rng)
        full = classify(p, rules).matched
        assert classify(p, list(reversed(rules))).matched == full
        for rule in rules:
            remaining = [r for r in rules if r.name != rule.name]
            assert classify(p, remaining).matched == full - {rule.name}


def test_high_criticality_ablation_reads_na_as_any():
    p = _profile(criticality=CriticalityLevel.HIGH, passivated=True, regime=AttitudeRegime.FAST)
    assert classify(p, default_rules()).matched == {"Ablation_Based"}


def test_explain_names_violated_slots(fixture_objects, fixture_given):
    topex = next(o for o in fixture_objects if o.id == "1992-052A")
    assessment = assess_object(topex, ThresholdConfig(), fixture_given[topex.id])
    text = explain(classify(profile(topex, assessment), default_rules()))
    assert text.count("[MATCHED]") == 2
    assert text.count("[REJECTED]") == 6
    assert "[MATCHED] Ablation_Based" in text
    assert "regimes: required {medium, slow, stable}, found fast" in text


def test_empty_slot_set_is_rejected():
    with pytest.raises(EmptySlotSet):
        CaptureRule("Broken", regimes=frozenset())


def test_default_rule_file_matches_built_in_rules():
    config = load_rule_config(default_rules_bytes())
    assert list(config.rules) == default_rules()
    assert ThresholdConfig().with_overrides(config.thresholds) == ThresholdConfig()


def test_rules_document_round_trips():
    assert load_rules(rules_document(default_rules()).encode()) == default_rules()


@pytest.mark.parametrize(
    "doc, path",
    [
        ({"rules": [{"name": "X", "regimes": ["spinning"]}]}, "rules/0/regimes/0"),
        ({"rules": [{"name": "X", "colour": "red"}]}, "rules/0"),
        ({"rules": [{}]}, "rules/0"),
        ({"rules": "all"}, "rules"),
        ({}, "$"),
    ],
)
def test_rule_config_schema_errors(doc, path):
    with pytest.raises(SchemaViolation) as excinfo:
        load_rule_config(json.dumps(doc).encode())
    assert excinfo.value.path == path
    assert excinfo.value.exit_code == 3


def test_rule_config_semantic_errors():
    with pytest.raises(DuplicateRuleName):
        load_rule_config(json.dumps({"rules": [{"name": "A"}, {"name": "A"}]}).encode())
    with pytest.raises(EmptySlotSet):
        load_rule_config(json.dumps({"rules": [{"name": "A", "criticality": []}]}).encode())
    with pytest.raises(SchemaViolation):
        load_rule_config(b"{not json")


def test_custom_rules_and_thresholds():
    doc = {
        "rules": [{"name": "Grab_Anything", "object_type": "RB", "grapple_feature": True}],
        "thresholds": {"slow_max_deg_s": 2.0},
    }
    config = load_rule_config(json.dumps(doc).encode())
    cfg = ThresholdConfig().with_overrides(config.thresholds)
    assert cfg.slow_max_deg_s == 2.0
    p = _profile(object_type=ObjectType.ROCKET_BODY, regime=attitude_regime(3.0, cfg))
    assert p.regime is AttitudeRegime.MEDIUM
    assert classify(p, config.rules).matched == {"Grab_Anything"}


def test_profile_from_object():
    obj = make_object(angular_rate_deg_s=5.0, interface_clearance_m2=0.2799)
    p = profile(obj, assess(obj, 0.03, ThresholdConfig()))
    assert (p.regime, p.clearance, p.criticality) == (AttitudeRegime.MEDIUM, ClearanceClass.NARROW, CriticalityLevel.MEDIUM)
