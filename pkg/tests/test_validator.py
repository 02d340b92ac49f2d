from typing import List

from pyairls.checks import ModelCheck, ModelViolation
from pyairls.densities import StandardGND
from pyairls.model import (
    BlockLayout,
    LinearForm,
    MultiaffineExpr,
    MultiaffineModel,
    ResidualTerm,
)
from pyairls.validator import ModelValidator, ValidationResult, validate_model


class MockCheck(ModelCheck):
    def __init__(
        self, check_id: str, violations: List[ModelViolation], elements: int = 1
    ) -> None:
        super().__init__(check_id=check_id, description="Mock check for testing")
        self.violations_to_return = violations
        self.elements = elements

    def check(self, model: MultiaffineModel) -> List[ModelViolation]:
        self.elements_checked = self.elements
        return self.violations_to_return


def _model() -> MultiaffineModel:
    layout = BlockLayout([("x", 1)])
    return MultiaffineModel(layout, [(MultiaffineExpr.unit(0, 0, 1) - 1.0, StandardGND(2.0))])


def test_validator_empty_checks() -> None:
    result = ModelValidator([]).validate(_model())
    assert result.violations == []
    assert result.elements_checked == 0
    assert result.ok


def test_validator_collects_violations() -> None:
    error = ModelViolation("a", "error", "broken", factor_index=0)
    warning = ModelViolation("b", "warning", "suspicious")
    validator = ModelValidator([MockCheck("a", [error], 3), MockCheck("b", [warning], 2)])
    result = validator.validate(_model())
    assert result.elements_checked == 5
    assert result.errors == [error]
    assert result.warnings == [warning]
    assert not result.ok
    assert result.duration_ms >= 0


def test_warnings_alone_are_ok() -> None:
    result = ValidationResult(
        violations=[ModelViolation("b", "warning", "w")], duration_ms=0.0, elements_checked=1
    )
    assert result.ok


def test_add_and_remove_check() -> None:
    validator = ModelValidator([])
    validator.add_check(MockCheck("a", [ModelViolation("a", "error", "x")]))
    assert not validator.validate(_model()).ok
    validator.remove_check("a")
    assert validator.validate(_model()).ok


def test_validate_model_default_checks() -> None:
    assert validate_model(_model()).ok
    layout = BlockLayout([("x", 1)])
    term = ResidualTerm(1.0, (LinearForm(0, [1.0]), LinearForm(0, [1.0])))
    bad = MultiaffineModel(layout, [(MultiaffineExpr((term,)), StandardGND(2.0))])
    result = validate_model(bad)
    assert not result.ok
    assert result.errors[0].check_id == "multiaffinity"
