"""Problem-file schema and (de)serialization of models."""

import json
import math
from pathlib import Path
from typing import Any, Dict, List, Optional, Tuple, Union

import numpy as np
from pydantic import BaseModel, ConfigDict, Field, ValidationError, model_validator

from ..densities import density_from_dict
from ..exceptions import DensityError, ModelError, ProblemFormatError
from .expr import LinearForm, MultiaffineExpr, ResidualTerm
from .layout import BlockLayout
from .model import Factor, MultiaffineModel


class BlockSpec(BaseModel):
    model_config = ConfigDict(extra="forbid")

    name: str
    size: int = Field(ge=1)


class FormSpec(BaseModel):
    """Either a dense ``vector`` or sparse ``entries`` [[index, value], ...]."""

    model_config = ConfigDict(extra="forbid")

    block: str
    vector: Optional[List[float]] = None
    entries: Optional[List[Tuple[int, float]]] = None

    @model_validator(mode="after")
    def _one_representation(self) -> "FormSpec":
        if (self.vector is None) == (self.entries is None):
            raise ValueError("give exactly one of 'vector' or 'entries'")
        return self


class TermSpec(BaseModel):
    model_config = ConfigDict(extra="forbid")

    coeff: float
    factors: List[FormSpec] = Field(default_factory=list)


class DensitySpec(BaseModel):
    model_config = ConfigDict(extra="forbid")

    type: str
    q: Optional[float] = None
    scale: Optional[float] = None
    rate_pos: Optional[float] = None
    rate_neg: Optional[float] = None


class FactorSpec(BaseModel):
    model_config = ConfigDict(extra="forbid")

    terms: List[TermSpec]
    density: DensitySpec
    label: Optional[str] = None


class GeneratorSpec(BaseModel):
    name: str
    params: Dict[str, Any] = Field(default_factory=dict)
    seed: int = 0


class ProblemSpec(BaseModel):
    """Top-level problem file."""

    model_config = ConfigDict(extra="allow")

    blocks: List[BlockSpec]
    qbar: Optional[int] = Field(default=None, ge=1)
    factors: List[FactorSpec]
    x_init: Optional[List[float]] = None
    generator: Optional[GeneratorSpec] = None


def _form_from_spec(
    spec: FormSpec, layout: BlockLayout, factor_index: int, term_index: int
) -> LinearForm:
    try:
        block = layout.index(spec.block)
    except ModelError:
        raise ProblemFormatError(
            f"unknown block '{spec.block}'", factor_index, term_index
        )
    size = layout.size(block)
    if spec.vector is not None:
        if len(spec.vector) != size:
            raise ProblemFormatError(
                f"vector for block '{spec.block}' has length "
                f"{len(spec.vector)}, expected {size}",
                factor_index,
                term_index,
            )
        vector = np.asarray(spec.vector, dtype=float)
    else:
        vector = np.zeros(size)
        for index, value in spec.entries or []:
            if not 0 <= index < size:
                raise ProblemFormatError(
                    f"entry index {index} out of range for block "
                    f"'{spec.block}' of size {size}",
                    factor_index,
                    term_index,
                )
            vector[index] += value
    if not np.all(np.isfinite(vector)):
        raise ProblemFormatError(
            f"non-finite coefficients on block '{spec.block}'",
            factor_index,
            term_index,
        )
    return LinearForm(block, vector)


def model_from_spec(spec: ProblemSpec) -> MultiaffineModel:
    try:
        layout = BlockLayout([(b.name, b.size) for b in spec.blocks])
    except ModelError as e:
        raise ProblemFormatError(str(e))

    factors = []
    for h, fspec in enumerate(spec.factors):
        terms = []
        for m, tspec in enumerate(fspec.terms):
            if not math.isfinite(tspec.coeff):
                raise ProblemFormatError("non-finite coefficient", h, m)
            forms = tuple(
                _form_from_spec(f, layout, h, m) for f in tspec.factors
            )
            # raw constructor: degree violations are left to validation
            terms.append(ResidualTerm(tspec.coeff, forms))
        try:
            density = density_from_dict(fspec.density.model_dump(exclude_none=True))
        except (DensityError, KeyError, TypeError) as e:
            raise ProblemFormatError(f"invalid density: {e}", h)
        factors.append(Factor(MultiaffineExpr(tuple(terms)), density, fspec.label))
    return MultiaffineModel(layout, factors, qbar=spec.qbar)


def parse_problem(data: Dict[str, Any]) -> Tuple[MultiaffineModel, ProblemSpec]:
    """Validate a problem mapping and build its model."""
    try:
        spec = ProblemSpec.model_validate(data)
    except ValidationError as e:
        raise ProblemFormatError(_describe_validation_error(e))
    return model_from_spec(spec), spec


def _describe_validation_error(error: ValidationError) -> str:
    messages = []
    for item in error.errors():
        loc = list(item["loc"])
        where = []
        if len(loc) >= 2 and loc[0] == "factors":
            where.append(f"factor {loc[1]}")
            if len(loc) >= 4 and loc[2] == "terms":
                where.append(f"term {loc[3]}")
        path = ".".join(str(p) for p in loc)
        prefix = ", ".join(where)
        messages.append(
            f"{prefix + ': ' if prefix else ''}{path}: {item['msg']}"
        )
    return "; ".join(messages)


def load_problem(path: Union[str, Path]) -> Tuple[MultiaffineModel, ProblemSpec]:
    try:
        with open(path, "r", encoding="utf-8") as f:
            data = json.load(f)
    except json.JSONDecodeError as e:
        raise ProblemFormatError(f"{path}: invalid JSON: {e}")
    if not isinstance(data, dict):
        raise ProblemFormatError(f"{path}: top level must be an object")
    return parse_problem(data)


def _form_to_dict(form: LinearForm, layout: BlockLayout) -> Dict[str, Any]:
    name = layout.name(form.block)
    nz = np.flatnonzero(form.vector)
    if 2 * nz.shape[0] > form.size:
        return {"block": name, "vector": [float(v) for v in form.vector]}
    return {
        "block": name,
        "entries": [[int(i), float(form.vector[i])] for i in nz],
    }


def model_to_dict(model: MultiaffineModel) -> Dict[str, Any]:
    """Canonical problem-file mapping for a model."""
    factors = []
    for factor in model.factors:
        entry: Dict[str, Any] = {
            "terms": [
                {
                    "coeff": term.coeff,
                    "factors": [
                        _form_to_dict(f, model.layout) for f in term.factors
                    ],
                }
                for term in factor.expr.terms
            ],
            "density": factor.density.to_dict(),
        }
        if factor.label is not None:
            entry["label"] = factor.label
        factors.append(entry)
    data: Dict[str, Any] = {"blocks": model.layout.to_list()}
    if model.qbar_explicit:
        data["qbar"] = model.qbar
    data["factors"] = factors
    return data


def dump_problem(
    model: MultiaffineModel,
    path: Union[str, Path],
    extra: Optional[Dict[str, Any]] = None,
) -> None:
    data = model_to_dict(model)
    if extra:
        data.update(extra)
    with open(path, "w", encoding="utf-8") as f:
        json.dump(data, f, indent=2)
        f.write("\n")
