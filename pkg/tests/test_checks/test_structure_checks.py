import pytest

from pyairls.checks import (
    DegenerateFactorCheck,
    DimensionCheck,
    ExponentBoundCheck,
    ModelViolation,
    MultiaffinityCheck,
    ZeroModeCheck,
)
from pyairls.densities import Custom, NonInformative, StandardGND
from pyairls.model import (
    BlockLayout,
    LinearForm,
    MultiaffineExpr,
    MultiaffineModel,
    ResidualTerm,
)


@pytest.fixture
def layout() -> BlockLayout:
    return BlockLayout([("x", 2), ("y", 1)])


def _model(layout: BlockLayout, *terms: ResidualTerm, **kwargs: object) -> MultiaffineModel:
    density = kwargs.get("density", StandardGND(2.0))
    return MultiaffineModel(
        layout,
        [(MultiaffineExpr(terms), density)],
        qbar=kwargs.get("qbar"),  # type: ignore[arg-type]
    )


def test_well_formed_model_passes(layout: BlockLayout) -> None:
    model = _model(layout, ResidualTerm(1.0, (LinearForm(0, [1.0, 2.0]), LinearForm(1, [1.0]))))
    for check in (DimensionCheck(), MultiaffinityCheck(), ExponentBoundCheck(),
                  DegenerateFactorCheck(), ZeroModeCheck()):
        assert check.check(model) == []


def test_degree_two_term(layout: BlockLayout) -> None:
    model = _model(
        layout,
        ResidualTerm(-1.0),
        ResidualTerm(1.0, (LinearForm(0, [1.0, 0.0]), LinearForm(0, [0.0, 1.0]))),
    )
    violations = MultiaffinityCheck().check(model)
    assert len(violations) == 1
    v = violations[0]
    assert v.description == "degree 2 in block x"
    assert v.location == "factor 0, term 1"
    assert v.severity == "error"


def test_wrong_vector_length(layout: BlockLayout) -> None:
    model = _model(layout, ResidualTerm(1.0, (LinearForm(0, [1.0, 2.0, 3.0]),)))
    violations = DimensionCheck().check(model)
    assert len(violations) == 1
    assert "has length 3, expected 2" in violations[0].description


def test_unknown_block(layout: BlockLayout) -> None:
    model = _model(layout, ResidualTerm(1.0, (LinearForm(5, [1.0]),)))
    violations = DimensionCheck().check(model)
    assert violations[0].description == "unknown block index 5"


def test_non_finite_coefficient(layout: BlockLayout) -> None:
    model = _model(layout, ResidualTerm(float("inf"), (LinearForm(1, [1.0]),)))
    violations = DimensionCheck().check(model)
    assert violations[0].description == "non-finite coefficient"


def test_qbar_below_exponent(layout: BlockLayout) -> None:
    model = _model(layout, ResidualTerm(1.0, (LinearForm(1, [1.0]),)),
                   density=StandardGND(3.0), qbar=2)
    violations = ExponentBoundCheck().check(model)
    assert len(violations) == 1
    assert "exceeds qbar=2" in violations[0].description
    assert violations[0].suggested_fix == "Set qbar >= 3"


def test_qbar_zero(layout: BlockLayout) -> None:
    model = _model(layout, ResidualTerm(1.0, (LinearForm(1, [1.0]),)),
                   density=NonInformative(), qbar=0)
    violations = ExponentBoundCheck().check(model)
    assert violations[0].location == "model"


def test_constant_factor_is_a_warning(layout: BlockLayout) -> None:
    model = _model(layout, ResidualTerm(2.0))
    violations = DegenerateFactorCheck().check(model)
    assert [v.severity for v in violations] == ["warning"]
    flat = _model(layout, ResidualTerm(2.0), density=NonInformative())
    assert DegenerateFactorCheck().check(flat) == []


def test_custom_density_zero_mode(layout: BlockLayout) -> None:
    term = ResidualTerm(1.0, (LinearForm(1, [1.0]),))
    good = _model(layout, term, density=Custom(lambda y: y * y, name="sq"))
    assert ZeroModeCheck().check(good) == []
    shifted = _model(layout, term, density=Custom(lambda y: (y - 1.0) ** 2, name="shifted"))
    violations = ZeroModeCheck().check(shifted)
    assert len(violations) == 1
    assert "shifted" in violations[0].description


def test_elements_checked(layout: BlockLayout) -> None:
    model = _model(layout, ResidualTerm(1.0), ResidualTerm(1.0, (LinearForm(1, [1.0]),)))
    check = DimensionCheck()
    check.check(model)
    assert check.elements_checked == 2


def test_violation_location() -> None:
    assert ModelViolation("c", "error", "d", factor_index=3).location == "factor 3"
    assert ModelViolation("c", "error", "d").location == "model"
    assert ModelViolation("c", "error", "d", 1, 2).location == "factor 1, term 2"
