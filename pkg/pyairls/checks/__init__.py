"""Structural model checks."""

from .base import ModelCheck, ModelViolation
from .structure_checks import (
    DegenerateFactorCheck,
    DimensionCheck,
    ExponentBoundCheck,
    MultiaffinityCheck,
    ZeroModeCheck,
)

__all__ = [
    "ModelCheck",
    "ModelViolation",
    "DimensionCheck",
    "MultiaffinityCheck",
    "ExponentBoundCheck",
    "DegenerateFactorCheck",
    "ZeroModeCheck",
]
