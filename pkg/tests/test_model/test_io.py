import json
from pathlib import Path
from typing import Any, Dict

import numpy as np
import pytest

from pyairls.densities import AsymmetricLaplace, NonInformative, ScaledGND, StandardGND
from pyairls.exceptions import ProblemFormatError
from pyairls.model import dump_problem, load_problem, model_to_dict, parse_problem


@pytest.fixture
def problem() -> Dict[str, Any]:
    return {
        "blocks": [{"name": "a", "size": 2}, {"name": "b", "size": 1}],
        "factors": [
            {
                "terms": [
                    {
                        "coeff": 2.0,
                        "factors": [
                            {"block": "a", "vector": [1.0, 0.0]},
                            {"block": "b", "entries": [[0, 1.0]]},
                        ],
                    },
                    {"coeff": -1.0},
                ],
                "density": {"type": "gnd", "q": 2},
                "label": "product",
            },
            {
                "terms": [{"coeff": 1.0, "factors": [{"block": "b", "vector": [1.0]}]}],
                "density": {"type": "gnd", "q": 1, "scale": 0.5},
            },
            {
                "terms": [{"coeff": 1.0, "factors": [{"block": "a", "entries": [[1, 3.0]]}]}],
                "density": {"type": "asym_laplace", "rate_pos": 1.0, "rate_neg": 2.0},
            },
            {
                "terms": [{"coeff": 1.0, "factors": [{"block": "b", "vector": [1.0]}]}],
                "density": {"type": "flat"},
            },
        ],
        "x_init": [0.0, 0.0, 1.0],
    }


def test_parse_problem(problem: Dict[str, Any]) -> None:
    model, spec = parse_problem(problem)
    assert model.layout.names == ["a", "b"]
    assert model.n_factors == 4
    assert model.factors[0].label == "product"
    assert model.densities[0] == StandardGND(2.0)
    assert model.densities[1] == ScaledGND(1.0, 0.5)
    assert model.densities[2] == AsymmetricLaplace(1.0, 2.0)
    assert model.densities[3] == NonInformative()
    assert spec.x_init == [0.0, 0.0, 1.0]
    x = np.array([2.0, 1.0, 3.0])
    assert model.eval_residuals(x) == pytest.approx([11.0, 3.0, 3.0, 3.0])


def test_round_trip(problem: Dict[str, Any], tmp_path: Path) -> None:
    model, _ = parse_problem(problem)
    path = tmp_path / "p.json"
    dump_problem(model, path, extra={"x_init": [0.0, 0.0, 1.0]})
    again, spec = load_problem(path)
    assert again.layout == model.layout
    assert all(a.expr.same_as(b.expr) for a, b in zip(again.factors, model.factors))
    assert again.densities == model.densities
    assert spec.x_init == [0.0, 0.0, 1.0]
    assert model_to_dict(again) == model_to_dict(model)


def test_explicit_qbar_is_kept(problem: Dict[str, Any]) -> None:
    problem["qbar"] = 3
    model, _ = parse_problem(problem)
    assert model.qbar == 3
    assert model_to_dict(model)["qbar"] == 3


def test_unknown_block_names_factor_and_term(problem: Dict[str, Any]) -> None:
    problem["factors"][2]["terms"][0]["factors"][0]["block"] = "zz"
    with pytest.raises(ProblemFormatError, match="factor 2, term 0: unknown block 'zz'"):
        parse_problem(problem)


def test_vector_length_mismatch(problem: Dict[str, Any]) -> None:
    problem["factors"][0]["terms"][0]["factors"][0]["vector"] = [1.0]
    with pytest.raises(ProblemFormatError, match="factor 0, term 0"):
        parse_problem(problem)


def test_entry_out_of_range(problem: Dict[str, Any]) -> None:
    problem["factors"][1]["terms"][0]["factors"][0] = {"block": "b", "entries": [[4, 1.0]]}
    with pytest.raises(ProblemFormatError, match="out of range"):
        parse_problem(problem)


def test_schema_errors_name_location(problem: Dict[str, Any]) -> None:
    del problem["factors"][1]["terms"][0]["coeff"]
    with pytest.raises(ProblemFormatError, match="factor 1, term 0"):
        parse_problem(problem)


def test_form_needs_one_representation(problem: Dict[str, Any]) -> None:
    problem["factors"][0]["terms"][0]["factors"][0]["entries"] = [[0, 1.0]]
    with pytest.raises(ProblemFormatError, match="exactly one"):
        parse_problem(problem)


def test_invalid_density(problem: Dict[str, Any]) -> None:
    problem["factors"][1]["density"] = {"type": "gnd", "q": -1}
    with pytest.raises(ProblemFormatError, match="factor 1: invalid density"):
        parse_problem(problem)


def test_invalid_json(tmp_path: Path) -> None:
    path = tmp_path / "bad.json"
    path.write_text("{not json")
    with pytest.raises(ProblemFormatError, match="invalid JSON"):
        load_problem(path)
    path.write_text(json.dumps([1, 2]))
    with pytest.raises(ProblemFormatError, match="top level"):
        load_problem(path)
