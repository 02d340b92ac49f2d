import math

import numpy as np
import pytest
from scipy import integrate

from pyairls.densities import (
    AsymmetricLaplace,
    Custom,
    NonInformative,
    ScaledGND,
    StandardGND,
    default_qbar,
    density_from_dict,
    gnd_exponent,
    gnd_log_density,
    group_densities,
    modified_residual,
    neg_log_ratio,
    sample_gnd,
    weight,
)
from pyairls.exceptions import DensityError, NumericalError


@pytest.mark.parametrize("q", [0.2, 0.5, 1.0, 2.0, 5.0])
def test_gnd_normalized(q: float) -> None:
    d = StandardGND(q)
    # y = e^s keeps the heavy tails of small q inside a finite range
    upper = math.log(1e3 / q) / q
    half, _ = integrate.quad(
        lambda s: math.exp(d.log_density(np.array(math.exp(s))) + s), -60.0, upper, limit=200
    )
    total = 2.0 * half
    assert total == pytest.approx(1.0, rel=1e-6)


def test_scaled_gnd_normalized() -> None:
    d = ScaledGND(2.0, 0.3)
    total, _ = integrate.quad(lambda y: math.exp(d.log_density(np.array(y))), -np.inf, np.inf)
    assert total == pytest.approx(1.0, rel=1e-6)


def test_asymmetric_laplace_normalized() -> None:
    d = AsymmetricLaplace(2.0, 0.5)
    total, _ = integrate.quad(lambda y: math.exp(d.log_density(np.array(y))), -np.inf, np.inf)
    assert total == pytest.approx(1.0, rel=1e-6)


def test_neg_log_ratio_values() -> None:
    assert neg_log_ratio(StandardGND(2.0), 1.5) == pytest.approx(2.0 * 1.5**2)
    assert neg_log_ratio(ScaledGND(1.0, 2.0), -3.0) == pytest.approx(1.5)
    assert neg_log_ratio(AsymmetricLaplace(2.0, 0.5), [1.0, -1.0]) == pytest.approx([2.0, 0.5])
    assert neg_log_ratio(StandardGND(1.0), 0.0) == 0.0


def test_flat_prior_has_no_ratio() -> None:
    with pytest.raises(DensityError, match="flat"):
        neg_log_ratio(NonInformative(), 1.0)
    d = NonInformative()
    assert d.irls_weight(np.array([1.0, 2.0]), 1e-3, 2) == pytest.approx([0.0, 0.0])


def test_modified_residual() -> None:
    assert modified_residual(0.0, 0.25, 2) == pytest.approx(0.5)
    assert modified_residual(-3.0, 16.0, 2) == pytest.approx(-5.0)
    assert modified_residual([2.0], 0.0, 3) == pytest.approx([2.0 ** (2 / 3)])


def test_weight_matches_irls_weight_for_standard_gnd() -> None:
    # for StandardGND(2) the unit scale is sqrt(2)
    d = StandardGND(2.0)
    r = np.array([0.3, -1.2])
    rho = modified_residual(r, 1e-3, 2)
    assert weight(d, rho, 2) == pytest.approx(2.0 * np.ones(2))
    assert d.irls_weight(r, 1e-3, 2) == pytest.approx(4.0 * np.ones(2))


def test_weight_rejects_zero_modified_residual() -> None:
    with pytest.raises(NumericalError, match="alpha must be strictly positive"):
        weight(StandardGND(1.0), 0.0, 2)


def test_surrogate_tends_to_penalty() -> None:
    r = np.array([0.7, -0.2, 1.9])
    for d in (StandardGND(1.0), ScaledGND(1.5, 0.4), ScaledGND(2.0, 3.0)):
        exact = d.neg_log_ratio(r)
        assert d.surrogate(r, 1e-12, 2) == pytest.approx(exact, rel=1e-5)


def test_irls_weight_is_surrogate_derivative() -> None:
    # d/dr surrogate = weight * r when qbar = 2
    d = ScaledGND(1.5, 0.7)
    r = np.array([0.4, -1.1])
    h = 1e-6
    deriv = (d.surrogate(r + h, 1e-3, 2) - d.surrogate(r - h, 1e-3, 2)) / (2 * h)
    assert deriv == pytest.approx(d.irls_weight(r, 1e-3, 2) * r, rel=1e-5)


def test_custom_density() -> None:
    d = Custom(lambda y: abs(y) ** 3, name="cubic")
    assert d.neg_log_ratio(np.array([2.0])) == pytest.approx([8.0])
    bad = Custom(lambda y: -abs(y), name="bad")
    with pytest.raises(DensityError, match="zero-mode"):
        bad.neg_log_ratio(np.array([1.0]))
    with pytest.raises(DensityError, match="cannot be written"):
        d.to_dict()


def test_invalid_parameters() -> None:
    with pytest.raises(DensityError):
        StandardGND(0.0)
    with pytest.raises(DensityError):
        ScaledGND(2.0, -1.0)
    with pytest.raises(DensityError):
        AsymmetricLaplace(1.0, 0.0)


def test_density_from_dict() -> None:
    assert density_from_dict({"type": "gnd", "q": 1.5}) == StandardGND(1.5)
    assert density_from_dict({"type": "gnd", "q": 2, "scale": 3}) == ScaledGND(2.0, 3.0)
    assert density_from_dict({"type": "flat"}) == NonInformative()
    with pytest.raises(DensityError, match="unknown density"):
        density_from_dict({"type": "cauchy"})
    for d in (StandardGND(1.0), ScaledGND(0.5, 2.0), AsymmetricLaplace(1.0, 3.0)):
        assert density_from_dict(d.to_dict()) == d


def test_default_qbar() -> None:
    assert default_qbar([StandardGND(1.0)]) == 2
    assert default_qbar([StandardGND(0.5), ScaledGND(2.5, 1.0)]) == 3
    assert default_qbar([AsymmetricLaplace(1.0, 1.0)]) == 2


def test_group_densities_by_value() -> None:
    groups = group_densities([StandardGND(1.0), ScaledGND(1.0, 2.0), StandardGND(1.0)])
    assert len(groups) == 2
    assert list(groups[0][1]) == [0, 2]
    assert gnd_exponent(StandardGND(1.5)) == 1.5
    assert gnd_exponent(NonInformative()) is None


def test_sample_gnd_moments() -> None:
    rng = np.random.default_rng(0)
    # variance of exp(-q|y|^q) with q = 2 is 1/4
    y = sample_gnd(2.0, 200000, rng)
    assert np.var(y) == pytest.approx(0.25, rel=0.02)
    z = ScaledGND(1.0, 2.0).sample(200000, rng)
    # Laplace with rate 1/2 has mean |z| = 2
    assert np.mean(np.abs(z)) == pytest.approx(2.0, rel=0.02)


def test_gnd_log_density_values() -> None:
    assert gnd_log_density(1.0, 0.0) == pytest.approx(math.log(0.5))
    assert gnd_log_density(2.0, 0.0) == pytest.approx(0.5 * math.log(2.0 / math.pi))
    assert gnd_log_density(2.0, 1.0) == pytest.approx(gnd_log_density(2.0, 0.0) - 2.0)
    values = gnd_log_density(2.0, np.array([0.0, 1.0]))
    assert isinstance(values, np.ndarray)
    with pytest.raises(DensityError, match="exponent must be > 0"):
        gnd_log_density(0.0, 1.0)
