from __future__ import annotations

from datetime import date
import json

import pytest

from conftest import make_object, raw_object, rocket_body
from debris_triage.catalog import (
    FORMAT_VERSION,
    RECORD_FIELDS,
    CosparId,
    ObjectType,
    PropellantClass,
    check_object,
    load,
    orbit_age_years,
    parse_date,
    parse_enum,
    parse_store,
    render_store,
    store,
    validate_object,
)
from debris_triage.errors import (
    CorruptRecord,
    IoFailure,
    MalformedId,
    NegativeAge,
    ObjectValidationError,
    UnknownEnumValue,
    UnsupportedVersion,
)


def test_cospar_id_is_trimmed():
    assert CosparId("  1992-052A ").value == "1992-052A"
    assert CosparId("1992-052A").launch_year == 1992


@pytest.mark.parametrize("value", ["1992052A", "1992-52A", "1992-052", "1992-052a", "1992-052ABCD", "1956-001A", "2999-001A", ""])
def test_malformed_cospar_ids(value):
    with pytest.raises(MalformedId):
        CosparId(value)


def test_parse_enum_accepts_codes_and_case():
    assert parse_enum(ObjectType, "rb") is ObjectType.ROCKET_BODY
    assert parse_enum(ObjectType, "Rocket Body") is ObjectType.ROCKET_BODY
    assert parse_enum(PropellantClass, "cryogenic") is PropellantClass.CRYOGENIC
    assert parse_enum(PropellantClass, "none") is PropellantClass.NO_PROPELLANT
    with pytest.raises(UnknownEnumValue):
        parse_enum(PropellantClass, "plasma")


def test_parse_date_forms():
    assert parse_date("1992-08") == date(1992, 8, 1)
    assert parse_date("1992-08-10T13:08:00Z") == date(1992, 8, 10)
    assert parse_date(date(2000, 1, 1)) == date(2000, 1, 1)
    for text in ("2000-01-01garbage", "2000-01-01T", "2000-01-01 12:00", "2000-01-01T12:00junk"):
        with pytest.raises(ValueError):
            parse_date(text)


def test_valid_object_has_no_violations():
    assert check_object(raw_object()) == []
    obj = make_object(name=None)
    assert obj.name == "1990-045A"
    assert obj.id == "1990-045A"


def test_all_violations_are_reported_together():
    raw = raw_object(cospar_id="90-45A", angular_rate_deg_s=-1, interface_material=None, orbit_class="LUNAR")
    with pytest.raises(ObjectValidationError) as excinfo:
        validate_object(raw)
    kinds = {(v.kind, v.field) for v in excinfo.value.violations}
    assert kinds == {
        ("MalformedId", "cospar_id"),
        ("NegativeQuantity", "angular_rate_deg_s"),
        ("MissingField", "interface_material"),
        ("UnknownEnumValue", "orbit_class"),
    }
    assert excinfo.value.exit_code == 1


def test_dates_before_launch_are_rejected():
    violations = check_object(raw_object(reentry_epoch="1989-01-01"))
    assert [(v.kind, v.field) for v in violations] == [("DateOrderViolation", "reentry_epoch")]


def test_passivation_needs_support():
    violations = check_object(raw_object(passivated="true"))
    assert [v.kind for v in violations] == ["UnsupportedPassivation"]
    assert make_object(passivated="true", deactivation_epoch="2006-01-18").passivated
    assert make_object(passivated="true", passivation_documented=True).passivated
    assert not make_object(passivated="unknown").passivated


def test_zero_clearance_is_rejected():
    assert [v.kind for v in check_object(raw_object(interface_clearance_m2=0))] == ["NegativeQuantity"]


def test_orbit_age_uses_julian_years():
    assert orbit_age_years(date(2000, 1, 1), date(2000, 1, 1)) == 0.0
    assert orbit_age_years(date(2000, 1, 1), date(2001, 1, 1)) == pytest.approx(366 / 365.25)
    assert orbit_age_years(date(1992, 8, 10), date(2019, 7, 31)) == pytest.approx(9851 / 365.25)
    with pytest.raises(NegativeAge):
        orbit_age_years(date(2000, 1, 2), date(2000, 1, 1))


def test_store_and_load_preserve_objects_sorted(tmp_path):
    objects = [make_object(), rocket_body(), make_object(cospar_id="1992-052A", passivated="true", deactivation_epoch="2006-01-18")]
    path = tmp_path / "out" / "objects.jsonl"
    assert store(objects, path) == 3

    lines = path.read_text(encoding="utf-8").splitlines()
    assert json.loads(lines[0]) == {"format": FORMAT_VERSION, "fields": list(RECORD_FIELDS)}
    assert [json.loads(line)["cospar_id"] for line in lines[1:]] == ["1978-018B", "1990-045A", "1992-052A"]
    assert load(path) == sorted(objects, key=lambda o: o.id)


def test_empty_store_is_header_only(tmp_path):
    path = tmp_path / "empty.jsonl"
    store([], path)
    assert len(path.read_text(encoding="utf-8").splitlines()) == 1
    assert load(path) == []


def test_store_is_deterministic():
    objects = [make_object(), rocket_body()]
    assert render_store(objects) == render_store(list(reversed(objects)))


def test_corrupt_line_is_reported_with_its_number():
    text = render_store([make_object(), rocket_body()])
    lines = text.splitlines()
    lines[2] = lines[2][:20]
    with pytest.raises(CorruptRecord) as excinfo:
        parse_store("\n".join(lines) + "\n")
    assert excinfo.value.line == 3
    assert excinfo.value.exit_code == 2


def test_reordered_fields_are_corrupt():
    header, line = render_store([make_object()]).splitlines()
    record = json.loads(line)
    reordered = json.dumps(dict(reversed(list(record.items()))))
    with pytest.raises(CorruptRecord):
        parse_store(f"{header}\n{reordered}\n")


def test_unknown_format_version():
    with pytest.raises(UnsupportedVersion):
        parse_store(json.dumps({"format": "debris-triage/9", "fields": []}) + "\n")


def test_missing_store_is_an_io_failure(tmp_path):
    with pytest.raises(IoFailure) as excinfo:
        load(tmp_path / "nope.jsonl")
    assert excinfo.value.exit_code == 2
