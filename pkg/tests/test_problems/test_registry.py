import numpy as np
import pytest

from pyairls.problems import (
    GENERATORS,
    generate,
    generator_params,
    get_generator,
    regenerator,
)


def test_registry_names() -> None:
    assert set(GENERATORS) == {
        "supply_demand",
        "water",
        "eiv_sysid",
        "admittance",
        "gpca",
        "tensor_regression",
        "random",
    }
    with pytest.raises(ValueError, match="unknown generator 'nope'"):
        get_generator("nope")


def test_generator_params_defaults() -> None:
    params = generator_params("supply_demand")
    assert params["T"] == 2
    assert params["n_T"] == 1
    assert "noise_seed" in params


def test_generate_checks_parameter_names() -> None:
    instance = generate("water", {"T": 4}, seed=1)
    assert instance.model.layout.n == 8
    assert instance.metadata["seed"] == 1
    with pytest.raises(ValueError, match="unknown parameter\\(s\\) for water: depth"):
        generate("water", {"depth": 3})


def test_regenerator_keeps_truth() -> None:
    record = generate("supply_demand", {"T": 3, "noise_ratio": 0.02}, seed=2).generator_record()
    factory = regenerator(record)
    a, b = factory(1), factory(2)
    assert np.array_equal(a.x_true, b.x_true)
    assert not np.array_equal(a.observations["D"], b.observations["D"])
    assert a.metadata["params"]["noise_seed"] == 1


def test_regenerator_needs_noise() -> None:
    with pytest.raises(ValueError, match="draws no noise"):
        regenerator({"name": "random", "params": {}})
