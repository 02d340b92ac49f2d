import numpy as np
import pytest

from pyairls.exceptions import ModelError
from pyairls.model import BlockLayout, LinearForm, MultiaffineExpr, ResidualTerm


@pytest.fixture
def layout() -> BlockLayout:
    return BlockLayout([("x", 2), ("y", 1)])


def test_linear_form_value(layout: BlockLayout) -> None:
    form = LinearForm(0, [1.0, -2.0])
    assert form.size == 2
    assert form.value(layout, np.array([3.0, 1.0, 5.0])) == 1.0


def test_linear_form_rejects_non_finite() -> None:
    with pytest.raises(ModelError, match="not finite"):
        LinearForm(0, [np.nan, 1.0])


def test_linear_form_is_read_only() -> None:
    form = LinearForm(0, np.array([1.0, 2.0]))
    with pytest.raises(ValueError):
        form.vector[0] = 5.0


def test_create_rejects_repeated_block() -> None:
    with pytest.raises(ModelError, match="degree 2"):
        ResidualTerm.create(1.0, [LinearForm(0, [1.0]), LinearForm(0, [2.0])])


def test_raw_term_keeps_repeated_block() -> None:
    term = ResidualTerm(1.0, (LinearForm(0, [1.0]), LinearForm(0, [2.0])))
    assert term.degree_in(0) == 2


def test_arithmetic(layout: BlockLayout) -> None:
    x = MultiaffineExpr.unit(0, 1, 2)
    y = MultiaffineExpr.linear(1, [2.0])
    expr = 3.0 * x * y - 4.0 + y
    point = np.array([7.0, 0.5, 2.0])
    # 3 * 0.5 * 4 - 4 + 4
    assert expr.value(layout, point) == pytest.approx(6.0)
    assert expr.blocks == (0, 1)
    assert not expr.is_constant
    assert (1.0 - x).value(layout, point) == pytest.approx(0.5)
    assert (-x).value(layout, point) == pytest.approx(-0.5)


def test_product_in_same_block_is_rejected() -> None:
    x = MultiaffineExpr.unit(0, 0, 2)
    with pytest.raises(ModelError, match="affine in every block"):
        x * MultiaffineExpr.unit(0, 1, 2)


def test_constant_expression(layout: BlockLayout) -> None:
    c = MultiaffineExpr.constant(2.5)
    assert c.is_constant
    assert c.blocks == ()
    assert c.value(layout, np.zeros(3)) == 2.5


def test_same_as() -> None:
    a = MultiaffineExpr.linear(0, [1.0, 2.0]) - 1.0
    b = MultiaffineExpr.linear(0, [1.0, 2.0]) - 1.0
    c = MultiaffineExpr.linear(0, [1.0, 3.0]) - 1.0
    assert a.same_as(b)
    assert not a.same_as(c)


def test_combining_with_unknown_type() -> None:
    with pytest.raises(TypeError):
        MultiaffineExpr.constant(1.0) + "x"  # type: ignore[operator]
