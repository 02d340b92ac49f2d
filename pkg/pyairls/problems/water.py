"""Water released by farms: pressure P_t, season D_t, irradiance I_t, rain
R_t, soil humidity H_t and released water W_t.

R and I are unknown; P, H, W and D are observed. The one-sided rain
penalty 50(|R_t| - R_t) is not multiaffine in R_t, so it is carried by a
separate asymmetric Laplace factor on R_t alone.
"""

import math
from typing import List, Optional

import numpy as np

from ..densities import AsymmetricLaplace, ScaledGND
from ..model import BlockLayout, Factor, MultiaffineExpr, MultiaffineModel
from .base import (
    ProblemInstance,
    check_noise,
    check_positive,
    const,
    noise_rng,
    perturb,
    truth_rng,
)

PRESSURE_DENSITY = ScaledGND(2.0, 0.2)
IRRADIANCE_DENSITY = AsymmetricLaplace(205.0, 5.0)
RAIN_DENSITY = ScaledGND(1.0, 3.0)
RAIN_SIGN_DENSITY = AsymmetricLaplace(1e-9, 100.0 / 3.0)
HUMIDITY_DENSITY = ScaledGND(2.0, 0.2)
WATER_DENSITY = ScaledGND(2.0, 0.2)
DECAY = 0.9


def season(T: int) -> np.ndarray:
    t = np.arange(1, T + 1)
    return np.sin(math.pi / 365.0 * t / T) ** 2


def _decay_matrix(T: int) -> np.ndarray:
    """L[t, k] = 0.9^(t-k) for k <= t."""
    t = np.arange(T)
    lag = t[:, None] - t[None, :]
    return np.where(lag >= 0, DECAY ** np.maximum(lag, 0), 0.0)


def gen_water(
    T: int = 10,
    noise_ratio: float = 0.0,
    seed: int = 0,
    noise_seed: Optional[int] = None,
    sample_latent: bool = False,
) -> ProblemInstance:
    """Blocks R (T) and I (T).

    By default I, R, H and W sit at their conditional modes so the noise-free
    instance is exactly consistent; ``sample_latent`` draws I and R from their
    conditionals instead. Observations P, H and W are perturbed by
    ``noise_ratio``.
    """
    check_positive(T=T)
    check_noise("noise_ratio", noise_ratio)

    rng = truth_rng(seed)
    D = season(T)
    P = np.exp(PRESSURE_DENSITY.sample(T, rng))
    I_mode = D + 1.0
    R_mode = 3.0 * P * (1.0 - D)
    if sample_latent:
        # asymmetric Laplace as a two-sided exponential mixture
        a, b = IRRADIANCE_DENSITY.rate_pos, IRRADIANCE_DENSITY.rate_neg
        positive = rng.random(T) < b / (a + b)
        I = I_mode + np.where(
            positive, rng.exponential(1.0 / a, T), -rng.exponential(1.0 / b, T)
        )
        R = np.abs(R_mode + RAIN_DENSITY.sample(T, rng))
    else:
        I, R = I_mode, R_mode
    decay = _decay_matrix(T)
    H = 10.0 + decay @ I
    W = H - R + 2.0

    nrng = noise_rng(seed, noise_seed)
    P_obs = perturb(P, noise_ratio, nrng)
    H_obs = perturb(H, noise_ratio, nrng)
    W_obs = perturb(W, noise_ratio, nrng)

    layout = BlockLayout([("R", T), ("I", T)])
    R_id, I_id = 0, 1
    factors: List[Factor] = []
    for t in range(T):
        factors.append(
            Factor(const(math.log(abs(P_obs[t]))), PRESSURE_DENSITY, f"P[{t}]")
        )
        factors.append(
            Factor(
                MultiaffineExpr.unit(I_id, t, T) - (D[t] + 1.0),
                IRRADIANCE_DENSITY,
                f"I[{t}]",
            )
        )
        factors.append(
            Factor(
                MultiaffineExpr.unit(R_id, t, T) - 3.0 * P_obs[t] * (1.0 - D[t]),
                RAIN_DENSITY,
                f"R[{t}]",
            )
        )
        factors.append(
            Factor(MultiaffineExpr.unit(R_id, t, T), RAIN_SIGN_DENSITY, f"R>=0[{t}]")
        )
        factors.append(
            Factor(
                const(H_obs[t] - 10.0) - MultiaffineExpr.linear(I_id, decay[t]),
                HUMIDITY_DENSITY,
                f"H[{t}]",
            )
        )
        factors.append(
            Factor(
                const(W_obs[t] - H_obs[t] - 2.0) + MultiaffineExpr.unit(R_id, t, T),
                WATER_DENSITY,
                f"W[{t}]",
            )
        )

    model = MultiaffineModel(layout, factors)
    x_true = np.concatenate([R, I])
    # R and I are latent: start at zero
    x_init = np.zeros(layout.n)
    return ProblemInstance(
        model=model,
        x_true=x_true,
        x_init=x_init,
        metadata={
            "generator": "water",
            "params": {
                "T": T,
                "noise_ratio": noise_ratio,
                "noise_seed": noise_seed,
                "sample_latent": sample_latent,
            },
            "seed": seed,
            "noise_level": noise_ratio,
            "factor_groups": 4 * T,
        },
        observations={"P": P_obs, "H": H_obs, "W": W_obs, "D": D},
    )
