"""Configuration utilities for debris-triage."""
from __future__ import annotations

from dataclasses import dataclass, fields, replace
from datetime import date
import logging
import math
import os
from typing import Any, Dict, Mapping, Optional, Sequence, Tuple

from .errors import SchemaViolation

PnLimits = Tuple[Tuple[float, int], ...]

DEFAULT_PN_LIMITS: PnLimits = ((1e-4, 1), (1e-2, 2), (1e-1, 3), (math.inf, 4))
CI_METHODS = ("linear", "log-log")


@dataclass(frozen=True)
class ThresholdConfig:
    """Thresholds behind the attitude/clearance partitions and the criticality matrix."""

    slow_max_deg_s: float = 5.0
    medium_max_deg_s: float = 18.0
    clearance_broad_min_m2: float = 0.28
    rb_fresh_age_years: float = 1.05
    pn_limits: PnLimits = DEFAULT_PN_LIMITS
    window_end: date = date(2019, 7, 31)
    # Severity rows the fragmentation table has no entry for.
    aged_unlisted_propellant_sn: int = 3
    no_propellant_sn: int = 1

    def __post_init__(self) -> None:
        if not 0 < self.slow_max_deg_s < self.medium_max_deg_s:
            raise SchemaViolation("thresholds.slow_max_deg_s", "require 0 < slow_max_deg_s < medium_max_deg_s")
        if not self.clearance_broad_min_m2 > 0:
            raise SchemaViolation("thresholds.clearance_broad_min_m2", "must be positive")
        if not self.rb_fresh_age_years > 0:
            raise SchemaViolation("thresholds.rb_fresh_age_years", "must be positive")
        for name in ("aged_unlisted_propellant_sn", "no_propellant_sn"):
            if getattr(self, name) not in (1, 2, 3, 4):
                raise SchemaViolation(f"thresholds.{name}", "must be a severity number in 1..4")
        _check_pn_limits(self.pn_limits)

    def with_overrides(self, overrides: Mapping[str, Any]) -> "ThresholdConfig":
        """Return a copy with the named fields replaced; values are coerced from JSON types."""
        known = {f.name for f in fields(self)}
        changes: Dict[str, Any] = {}
        for key, value in overrides.items():
            if key not in known:
                raise SchemaViolation(f"thresholds.{key}", "unknown threshold name")
            changes[key] = _coerce_threshold(key, value)
        return replace(self, **changes)

    def to_dict(self) -> Dict[str, Any]:
        return {
            "slow_max_deg_s": self.slow_max_deg_s,
            "medium_max_deg_s": self.medium_max_deg_s,
            "clearance_broad_min_m2": self.clearance_broad_min_m2,
            "rb_fresh_age_years": self.rb_fresh_age_years,
            "pn_limits": [[None if math.isinf(bound) else bound, pn] for bound, pn in self.pn_limits],
            "window_end": self.window_end.isoformat(),
            "aged_unlisted_propellant_sn": self.aged_unlisted_propellant_sn,
            "no_propellant_sn": self.no_propellant_sn,
        }


@dataclass(frozen=True)
class SurvivalConfig:
    """Confidence-band settings for the product-limit estimator."""

    alpha: float = 0.05
    ci_method: str = "linear"

    def __post_init__(self) -> None:
        if not 0 < self.alpha <= 1:
            raise SchemaViolation("survival.alpha", "must lie in (0, 1]")
        if self.ci_method not in CI_METHODS:
            raise SchemaViolation("survival.ci_method", f"must be one of {', '.join(CI_METHODS)}")


@dataclass(frozen=True)
class DiscosEndpoint:
    """Where the DISCOSweb-style API lives and the bearer token to present, if any."""

    base_url: str
    token: Optional[str] = None

    def url(self, path: str) -> str:
        """Return a full URL for the given API path."""
        normalized_path = path.lstrip("/")
        return f"{self.base_url.rstrip('/')}/{normalized_path}"

    def headers(self) -> Dict[str, str]:
        headers = {"Accept": "application/vnd.api+json", "DiscosWeb-Api-Version": "2"}
        if self.token:
            headers["Authorization"] = f"Bearer {self.token}"
        return headers


def _check_pn_limits(limits: Sequence[Tuple[float, int]]) -> None:
    if not limits:
        raise SchemaViolation("thresholds.pn_limits", "must not be empty")
    bounds = [float(b) for b, _ in limits]
    numbers = [int(pn) for _, pn in limits]
    if any(b2 <= b1 for b1, b2 in zip(bounds, bounds[1:])):
        raise SchemaViolation("thresholds.pn_limits", "upper bounds must be strictly increasing")
    if any(n2 <= n1 for n1, n2 in zip(numbers, numbers[1:])):
        raise SchemaViolation("thresholds.pn_limits", "probability numbers must be strictly increasing")
    if not math.isinf(bounds[-1]):
        raise SchemaViolation("thresholds.pn_limits", "last upper bound must be +inf")


def _coerce_threshold(key: str, value: Any) -> Any:
    try:
        if key == "window_end":
            return value if isinstance(value, date) else date.fromisoformat(str(value))
        if key == "pn_limits":
            return tuple(
                (math.inf if bound is None or bound == "inf" else float(bound), int(pn)) for bound, pn in value
            )
        if key in ("aged_unlisted_propellant_sn", "no_propellant_sn"):
            return int(value)
        return float(value)
    except (TypeError, ValueError) as exc:
        raise SchemaViolation(f"thresholds.{key}", f"cannot use {value!r}: {exc}") from exc


def _env_thresholds() -> ThresholdConfig:
    env_map = {
        "DEBRIS_TRIAGE_SLOW_MAX": "slow_max_deg_s",
        "DEBRIS_TRIAGE_MEDIUM_MAX": "medium_max_deg_s",
        "DEBRIS_TRIAGE_CLEARANCE_MIN": "clearance_broad_min_m2",
        "DEBRIS_TRIAGE_RB_FRESH_AGE": "rb_fresh_age_years",
        "DEBRIS_TRIAGE_WINDOW_END": "window_end",
    }
    overrides = {name: os.environ[var] for var, name in env_map.items() if os.getenv(var)}
    return ThresholdConfig().with_overrides(overrides)


DEFAULT_THRESHOLDS = _env_thresholds()
DEFAULT_SURVIVAL = SurvivalConfig()
DEFAULT_BATCH_SIZE = int(os.getenv("DEBRIS_TRIAGE_BATCH_SIZE", "50"))

DEFAULT_ENDPOINT = DiscosEndpoint(
    base_url=os.getenv("DISCOSWEB_URL", "https://discosweb.esoc.esa.int/api"),
    token=os.getenv("DISCOSWEB_TOKEN"),
)


def configure_logging(verbose: bool = False) -> None:
    """Install the single stderr handler used by the command line."""
    logging.basicConfig(
        level=logging.DEBUG if verbose else logging.WARNING,
        format="%(levelname)s %(name)s: %(message)s",
        force=True,
    )


__all__ = [
    "ThresholdConfig",
    "SurvivalConfig",
    "DiscosEndpoint",
    "DEFAULT_PN_LIMITS",
    "DEFAULT_THRESHOLDS",
    "DEFAULT_SURVIVAL",
    "DEFAULT_BATCH_SIZE",
    "DEFAULT_ENDPOINT",
    "CI_METHODS",
    "configure_logging",
]
