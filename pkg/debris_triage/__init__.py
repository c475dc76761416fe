"""Core package for intact derelict object triage: characterisation, breakup criticality and capture methods."""

from .catalog import CosparId, DebrisObject, load, store, validate_object
from .classifier import classify, default_rules, explain, profile
from .config import ThresholdConfig
from .criticality import assess, assess_object
from .survival import build_cohort, estimate, kaplan_meier

__all__ = [
    "CosparId",
    "DebrisObject",
    "ThresholdConfig",
    "validate_object",
    "store",
    "load",
    "build_cohort",
    "kaplan_meier",
    "estimate",
    "assess",
    "assess_object",
    "profile",
    "classify",
    "explain",
    "default_rules",
]
