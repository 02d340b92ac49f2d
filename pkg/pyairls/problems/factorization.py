"""Products of linear forms: subspace clustering (GPCA) and rank-one tensor
regression."""

from typing import List, Optional

import numpy as np

from ..densities import ScaledGND, StandardGND, sample_gnd
from ..model import BlockLayout, Factor, MultiaffineExpr, MultiaffineModel
from .base import (
    MIN_NOISE_SCALE,
    ProblemInstance,
    check_noise,
    check_positive,
    const,
    noise_rng,
    truth_rng,
)

ANCHOR_DENSITY = ScaledGND(2.0, 0.1)
ANCHOR_JITTER = 0.1


def gen_gpca(
    n_subspaces: int = 2,
    dim: int = 2,
    M_points: int = 50,
    q: float = 2.0,
    seed: int = 0,
    noise_ratio: float = 0.0,
    noise_seed: Optional[int] = None,
) -> ProblemInstance:
    """Points near a union of hyperplanes; block ``n{i}`` is the i-th normal.

    Each point contributes prod_i <phi_h, n_i> with a GND(q) density. Each
    normal also gets a Gaussian anchor <a_i, n_i> - 1 with a_i a jittered copy
    of the true direction, which fixes the scale and ordering of the normals.
    The true normals are scaled so every anchor residual is zero.
    """
    check_positive(n_subspaces=n_subspaces, dim=dim, M_points=M_points)
    check_noise("noise_ratio", noise_ratio)

    rng = truth_rng(seed)
    normals = rng.standard_normal((n_subspaces, dim))
    normals /= np.linalg.norm(normals, axis=1, keepdims=True)
    anchors = normals + ANCHOR_JITTER * rng.standard_normal(normals.shape) / np.sqrt(dim)
    points = rng.standard_normal((M_points, dim))
    labels = np.arange(M_points) % n_subspaces
    on_plane = points - np.sum(points * normals[labels], axis=1, keepdims=True) * normals[labels]

    nrng = noise_rng(seed, noise_seed)
    offsets = noise_ratio * sample_gnd(q, M_points, nrng)
    data = on_plane + offsets[:, None] * normals[labels]

    layout = BlockLayout([(f"n{i + 1}", dim) for i in range(n_subspaces)])
    density = StandardGND(q)
    factors: List[Factor] = []
    for h in range(M_points):
        expr = MultiaffineExpr.constant(1.0)
        for i in range(n_subspaces):
            expr = expr * MultiaffineExpr.linear(i, data[h])
        factors.append(Factor(expr, density, f"point[{h}]"))
    for i in range(n_subspaces):
        factors.append(
            Factor(MultiaffineExpr.linear(i, anchors[i]) - 1.0, ANCHOR_DENSITY, f"anchor[{i}]")
        )

    model = MultiaffineModel(layout, factors)
    x_true = np.concatenate(
        [normals[i] / float(anchors[i] @ normals[i]) for i in range(n_subspaces)]
    )
    x_init = np.concatenate(
        [anchors[i] / float(anchors[i] @ anchors[i]) for i in range(n_subspaces)]
    )
    return ProblemInstance(
        model=model,
        x_true=x_true,
        x_init=x_init,
        metadata={
            "generator": "gpca",
            "params": {
                "n_subspaces": n_subspaces,
                "dim": dim,
                "M_points": M_points,
                "q": q,
                "noise_ratio": noise_ratio,
                "noise_seed": noise_seed,
            },
            "seed": seed,
            "noise_level": noise_ratio,
        },
        observations={"points": data, "labels": labels, "normals": normals, "anchors": anchors},
    )


def gen_tensor_regression(
    n1: int = 3,
    n2: int = 4,
    T: int = 20,
    rank1: bool = True,
    q: float = 2.0,
    seed: int = 0,
    noise_ratio: float = 0.0,
    noise_seed: Optional[int] = None,
    outlier_ratio: float = 0.0,
) -> ProblemInstance:
    """Z = Phi x1 x2' + noise with blocks x1 (n1) and x2 (n2).

    Residual (t, h) is <Phi_t, x1> x2_h - Z_th. Noise is GND(q) scaled by
    noise_ratio * std(Z); outliers add uniform values on +-5 std(Z) to a
    fraction ``outlier_ratio`` of the entries.
    """
    check_positive(n1=n1, n2=n2, T=T)
    check_noise("noise_ratio", noise_ratio)
    if not rank1:
        raise ValueError("only rank-one regressions are supported")
    if not 0 <= outlier_ratio < 1:
        raise ValueError(f"outlier_ratio must lie in [0, 1), got {outlier_ratio}")

    rng = truth_rng(seed)
    Phi = rng.standard_normal((T, n1))
    x1 = rng.standard_normal(n1)
    x2 = rng.standard_normal(n2)
    Z_clean = np.outer(Phi @ x1, x2)
    x_init = rng.standard_normal(n1 + n2)

    nrng = noise_rng(seed, noise_seed)
    spread = float(np.std(Z_clean))
    Z = Z_clean + noise_ratio * spread * sample_gnd(q, Z_clean.shape, nrng)
    hit = nrng.random(Z.shape) < outlier_ratio
    Z = Z + np.where(hit, nrng.uniform(-5.0, 5.0, Z.shape) * spread, 0.0)

    layout = BlockLayout([("x1", n1), ("x2", n2)])
    density = ScaledGND(q, max(noise_ratio * spread, MIN_NOISE_SCALE))
    factors: List[Factor] = []
    for t in range(T):
        for h in range(n2):
            expr = MultiaffineExpr.linear(0, Phi[t]) * MultiaffineExpr.unit(1, h, n2) - Z[t, h]
            factors.append(Factor(expr, density, f"Z[{t},{h}]"))

    model = MultiaffineModel(layout, factors)
    return ProblemInstance(
        model=model,
        x_true=np.concatenate([x1, x2]),
        x_init=x_init,
        metadata={
            "generator": "tensor_regression",
            "params": {
                "n1": n1,
                "n2": n2,
                "T": T,
                "rank1": rank1,
                "q": q,
                "noise_ratio": noise_ratio,
                "noise_seed": noise_seed,
                "outlier_ratio": outlier_ratio,
            },
            "seed": seed,
            "noise_level": noise_ratio,
        },
        observations={"Phi": Phi, "Z": Z, "X": np.outer(x1, x2)},
    )


def outer_of(instance: ProblemInstance, x: np.ndarray) -> np.ndarray:
    """x1 x2' from a full iterate; invariant to the bilinear gauge."""
    parts = instance.model.layout.split(x)
    return np.outer(parts["x1"], parts["x2"])
