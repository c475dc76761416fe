from __future__ import annotations

from datetime import date
import logging
import math

import pytest

from debris_triage import config
from debris_triage.config import SurvivalConfig, ThresholdConfig, configure_logging
from debris_triage.errors import IoFailure, SchemaViolation
from debris_triage.fileio import atomic_write_text


def test_defaults():
    cfg = ThresholdConfig()
    assert (cfg.slow_max_deg_s, cfg.medium_max_deg_s, cfg.clearance_broad_min_m2) == (5.0, 18.0, 0.28)
    assert cfg.window_end == date(2019, 7, 31)
    assert math.isinf(cfg.pn_limits[-1][0])


def test_environment_overrides(monkeypatch):
    monkeypatch.setenv("DEBRIS_TRIAGE_SLOW_MAX", "4")
    monkeypatch.setenv("DEBRIS_TRIAGE_WINDOW_END", "2020-01-01")
    cfg = config._env_thresholds()
    assert cfg.slow_max_deg_s == 4.0
    assert cfg.window_end == date(2020, 1, 1)


def test_with_overrides_coerces_json_values():
    cfg = ThresholdConfig().with_overrides({"pn_limits": [[0.001, 1], [0.5, 2], ["inf", 3]], "window_end": "2021-06-30"})
    assert cfg.pn_limits == ((0.001, 1), (0.5, 2), (math.inf, 3))
    assert cfg.window_end == date(2021, 6, 30)
    assert cfg.to_dict()["pn_limits"][-1] == [None, 3]


@pytest.mark.parametrize(
    "overrides",
    [
        {"fast_max": 1},
        {"slow_max_deg_s": 20.0},
        {"clearance_broad_min_m2": 0},
        {"pn_limits": [[0.1, 1], [0.01, 2], [None, 3]]},
        {"pn_limits": [[0.1, 1], [0.2, 2]]},
        {"window_end": "yesterday"},
        {"no_propellant_sn": 7},
    ],
)
def test_invalid_overrides(overrides):
    with pytest.raises(SchemaViolation):
        ThresholdConfig().with_overrides(overrides)


def test_survival_config_ranges():
    assert SurvivalConfig(alpha=1.0).alpha == 1.0
    with pytest.raises(SchemaViolation):
        SurvivalConfig(alpha=0)
    with pytest.raises(SchemaViolation):
        SurvivalConfig(ci_method="arcsine")


def test_configure_logging_levels():
    configure_logging(verbose=True)
    assert logging.getLogger().level == logging.DEBUG
    configure_logging()
    assert logging.getLogger().level == logging.WARNING


def test_atomic_write_replaces_without_leftovers(tmp_path):
    target = tmp_path / "nested" / "out.csv"
    atomic_write_text(target, "a\n")
    atomic_write_text(target, "b\n")
    assert target.read_text(encoding="utf-8") == "b\n"
    assert [p.name for p in target.parent.iterdir()] == ["out.csv"]


def test_atomic_write_failure(tmp_path):
    blocker = tmp_path / "file"
    blocker.write_text("x", encoding="utf-8")
    with pytest.raises(IoFailure):
        atomic_write_text(blocker / "out.csv", "data")
