"""Admittance matrix identification from noisy nodal voltages and currents.

Currents satisfy I_t = Y V_t for every sample t. Both V and I are measured
with Gaussian noise; Y gets a Laplace prior promoting sparsity, or a flat
prior when ``prior_weight`` is 0 (plain errors-in-variables MLE).
"""

from typing import List, Optional

import numpy as np

from ..baselines import ols_solve
from ..densities import Density, NonInformative, ScaledGND
from ..model import BlockLayout, Factor, MultiaffineExpr, MultiaffineModel
from .base import (
    MIN_NOISE_SCALE,
    ProblemInstance,
    check_noise,
    const,
    noise_rng,
    truth_rng,
)


def random_laplacian(
    M: int, edge_prob: float, rng: np.random.Generator
) -> np.ndarray:
    """Weighted Laplacian of a connected random graph (path plus random edges)."""
    weights = np.zeros((M, M))
    for k in range(M - 1):
        weights[k, k + 1] = rng.uniform(1.0, 10.0)
    for j in range(M):
        for k in range(j + 2, M):
            if rng.random() < edge_prob:
                weights[j, k] = rng.uniform(1.0, 10.0)
    weights = weights + weights.T
    return np.diag(weights.sum(axis=1)) - weights


def _gaussian(sigma: float, magnitude: float) -> ScaledGND:
    # exp(-y^2 / (2 sigma^2)) is a q = 2 GND with scale 2 sigma
    return ScaledGND(2.0, max(2.0 * sigma, MIN_NOISE_SCALE * max(magnitude, 1.0)))


def gen_admittance(
    M_nodes: int = 4,
    N_samples: int = 20,
    noise_level: float = 0.0,
    seed: int = 0,
    noise_seed: Optional[int] = None,
    prior_weight: float = 1.0,
    edge_prob: float = 0.3,
) -> ProblemInstance:
    """Blocks V1..VN (M each) then Y (M * M, row-major); init V = measured, Y = 0.

    The Laplace prior has rate prior_weight / mean|Y_jk| over the nonzero
    entries of the true Y.
    """
    if M_nodes < 2:
        raise ValueError(f"M_nodes must be >= 2, got {M_nodes}")
    if N_samples < 1:
        raise ValueError(f"N_samples must be >= 1, got {N_samples}")
    check_noise("noise_level", noise_level)
    if prior_weight < 0:
        raise ValueError(f"prior_weight must be >= 0, got {prior_weight}")

    M, N = M_nodes, N_samples
    rng = truth_rng(seed)
    Y = random_laplacian(M, edge_prob, rng)
    V = 1.0 + 0.01 * rng.standard_normal((N, M))
    I = V @ Y.T

    nrng = noise_rng(seed, noise_seed)
    sigma_V = noise_level * float(np.mean(np.abs(V)))
    sigma_I = noise_level * float(np.mean(np.abs(I)))
    V_meas = V + sigma_V * nrng.standard_normal(V.shape)
    I_meas = I + sigma_I * nrng.standard_normal(I.shape)

    layout = BlockLayout([(f"V{t + 1}", M) for t in range(N)] + [("Y", M * M)])
    y_id = N
    current = _gaussian(sigma_I, float(np.mean(np.abs(I))))
    voltage = _gaussian(sigma_V, float(np.mean(np.abs(V))))
    prior: Density
    if prior_weight > 0:
        prior = ScaledGND(1.0, float(np.mean(np.abs(Y[Y != 0]))) / prior_weight)
    else:
        prior = NonInformative()

    factors: List[Factor] = []
    for t in range(N):
        for j in range(M):
            expr = const(-I_meas[t, j])
            for k in range(M):
                expr = expr + MultiaffineExpr.unit(y_id, j * M + k, M * M) * (
                    MultiaffineExpr.unit(t, k, M)
                )
            factors.append(Factor(expr, current, f"I[{t},{j}]"))
        for k in range(M):
            factors.append(
                Factor(
                    MultiaffineExpr.unit(t, k, M) - V_meas[t, k],
                    voltage,
                    f"V[{t},{k}]",
                )
            )
    for e in range(M * M):
        factors.append(Factor(MultiaffineExpr.unit(y_id, e, M * M), prior, f"Y[{e}]"))

    model = MultiaffineModel(layout, factors)
    x_true = np.concatenate([V.ravel(), Y.ravel()])
    x_init = np.concatenate([V_meas.ravel(), np.zeros(M * M)])
    return ProblemInstance(
        model=model,
        x_true=x_true,
        x_init=x_init,
        metadata={
            "generator": "admittance",
            "params": {
                "M_nodes": M,
                "N_samples": N,
                "noise_level": noise_level,
                "noise_seed": noise_seed,
                "prior_weight": prior_weight,
                "edge_prob": edge_prob,
            },
            "seed": seed,
            "noise_level": noise_level,
        },
        observations={"V": V_meas, "I": I_meas, "Y": Y},
    )


def admittance_of(instance: ProblemInstance, x: np.ndarray) -> np.ndarray:
    M = instance.observations["Y"].shape[0]
    return instance.model.layout.split(x)["Y"].reshape(M, M)


def ols_admittance(instance: ProblemInstance) -> np.ndarray:
    """Row-wise least squares of measured currents on measured voltages."""
    V, I = instance.observations["V"], instance.observations["I"]
    return np.vstack([ols_solve(V, I[:, j]) for j in range(I.shape[1])])
