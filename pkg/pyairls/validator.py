from dataclasses import dataclass
from enum import Enum
from typing import List, Optional
import time

from .checks.base import ModelCheck, ModelViolation
from .checks.structure_checks import (
    DegenerateFactorCheck,
    DimensionCheck,
    ExponentBoundCheck,
    MultiaffinityCheck,
    ZeroModeCheck,
)
from .model import MultiaffineModel


class Severity(Enum):
    ERROR = "error"
    WARNING = "warning"


@dataclass
class ValidationResult:
    """Violations found in a model plus timing metadata."""
    violations: List[ModelViolation]
    duration_ms: float
    elements_checked: int

    @property
    def errors(self) -> List[ModelViolation]:
        return [v for v in self.violations if v.severity == Severity.ERROR.value]

    @property
    def warnings(self) -> List[ModelViolation]:
        return [
            v for v in self.violations if v.severity == Severity.WARNING.value
        ]

    @property
    def ok(self) -> bool:
        return not self.errors


def default_checks() -> List[ModelCheck]:
    return [
        DimensionCheck(),
        MultiaffinityCheck(),
        ExponentBoundCheck(),
        DegenerateFactorCheck(),
        ZeroModeCheck(),
    ]


class ModelValidator:
    """Runs structural checks over a model before it is solved."""

    def __init__(self, checks: Optional[List[ModelCheck]] = None):
        self.checks = checks if checks is not None else default_checks()

    def validate(self, model: MultiaffineModel) -> ValidationResult:
        start_time = time.perf_counter()
        violations: List[ModelViolation] = []
        total_elements = 0

        for check in self.checks:
            violations.extend(check.check(model))
            total_elements += check.elements_checked

        duration_ms = (time.perf_counter() - start_time) * 1000
        return ValidationResult(
            violations=violations,
            duration_ms=duration_ms,
            elements_checked=total_elements,
        )

    def add_check(self, check: ModelCheck) -> None:
        self.checks.append(check)

    def remove_check(self, check_id: str) -> None:
        self.checks = [c for c in self.checks if c.check_id != check_id]


def validate_model(model: MultiaffineModel) -> ValidationResult:
    """Structural validation: multiaffinity, dimensions and qbar."""
    return ModelValidator().validate(model)
