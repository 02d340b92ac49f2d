"""Random multiaffine models for property checks."""

from typing import List, Optional, Sequence

import numpy as np

from ..densities import Density, ScaledGND, StandardGND
from ..model import (
    BlockLayout,
    Factor,
    LinearForm,
    MultiaffineExpr,
    MultiaffineModel,
    ResidualTerm,
)
from .base import ProblemInstance, check_positive, truth_rng


def gen_random_model(
    seed: int = 0,
    n_blocks: int = 3,
    max_block_size: int = 3,
    n_factors: int = 12,
    exponents: Sequence[float] = (0.5, 1.0, 1.5, 2.0),
    max_degree: int = 3,
    affine: bool = False,
    scaled: bool = False,
    qbar: Optional[int] = None,
) -> ProblemInstance:
    """Random factors of up to three terms, each a product of up to
    ``max_degree`` linear forms on distinct blocks.

    Every block also receives one affine factor so each block system has
    rows. With ``affine=True`` all terms have degree at most one.
    """
    check_positive(n_blocks=n_blocks, max_block_size=max_block_size, n_factors=n_factors)
    rng = truth_rng(seed)
    sizes = rng.integers(1, max_block_size + 1, size=n_blocks)
    layout = BlockLayout([(f"x{i + 1}", int(s)) for i, s in enumerate(sizes)])
    top = 1 if affine else min(max_degree, n_blocks)

    def density() -> Density:
        q = float(rng.choice(np.asarray(exponents, dtype=float)))
        if scaled:
            return ScaledGND(q, float(rng.uniform(0.5, 2.0)))
        return StandardGND(q)

    def form(block: int) -> LinearForm:
        return LinearForm(block, rng.standard_normal(int(sizes[block])))

    factors: List[Factor] = []
    for block in range(n_blocks):
        expr = MultiaffineExpr((ResidualTerm(1.0, (form(block),)),)) - float(
            rng.standard_normal()
        )
        factors.append(Factor(expr, density(), f"anchor[{block}]"))
    for h in range(n_factors):
        terms = [ResidualTerm(float(rng.standard_normal()))]
        for _ in range(int(rng.integers(1, 4))):
            degree = int(rng.integers(1, top + 1))
            blocks = sorted(rng.choice(n_blocks, size=degree, replace=False).tolist())
            terms.append(
                ResidualTerm.create(
                    float(rng.standard_normal()), [form(int(b)) for b in blocks]
                )
            )
        factors.append(Factor(MultiaffineExpr(tuple(terms)), density(), f"f[{h}]"))

    model = MultiaffineModel(layout, factors, qbar=qbar)
    x_true = rng.standard_normal(layout.n)
    x_init = rng.standard_normal(layout.n)
    return ProblemInstance(
        model=model,
        x_true=x_true,
        x_init=x_init,
        metadata={
            "generator": "random",
            "params": {
                "n_blocks": n_blocks,
                "max_block_size": max_block_size,
                "n_factors": n_factors,
                "exponents": list(exponents),
                "max_degree": max_degree,
                "affine": affine,
                "scaled": scaled,
                "qbar": qbar,
            },
            "seed": seed,
            "noise_level": 0.0,
        },
    )
