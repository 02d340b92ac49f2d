"""Supply and demand of a good sold by n_T sellers under taxes or subsidies.

Supply S_t follows a heavy-tailed prior centred at 100, prices follow
P_t ~ (20 - 0.1 S_t)(1 + 0.01 tau) / n_T with Gaussian noise and demand
D_t ~ 200 - 10 P_t with Laplace noise. S and D are observed; prices P_t and
the tax vector tau are unknown, tau with a flat prior.
"""

import math
from typing import List, Optional

import numpy as np

from ..densities import NonInformative, ScaledGND
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

SUPPLY_MEAN = 100.0
# exp(-((S - 100)^2 / 200)^(1/5)) as a GND with q = 2/5
SUPPLY_DENSITY = ScaledGND(0.4, math.sqrt(200.0) * 0.4**2.5)
PRICE_DENSITY = ScaledGND(2.0, 0.2)
DEMAND_DENSITY = ScaledGND(1.0, math.sqrt(2.0))
TAX_MEAN = 10.0
TAX_STD = 3.0


def price_block(t: int) -> str:
    return f"P{t + 1}"


def gen_supply_demand(
    T: int = 2,
    n_T: int = 1,
    noise_ratio: float = 0.0,
    seed: int = 0,
    noise_seed: Optional[int] = None,
) -> ProblemInstance:
    """Unknown blocks P1..PT (n_T each) then tau (n_T); x_init = 0."""
    check_positive(T=T, n_T=n_T)
    check_noise("noise_ratio", noise_ratio)

    rng = truth_rng(seed)
    S = SUPPLY_MEAN + SUPPLY_DENSITY.sample(T, rng)
    tau = rng.normal(TAX_MEAN, TAX_STD, size=n_T)
    P = np.outer(20.0 - 0.1 * S, 1.0 + 0.01 * tau) / n_T
    D = 200.0 - 10.0 * P

    nrng = noise_rng(seed, noise_seed)
    S_obs = perturb(S, noise_ratio, nrng)
    D_obs = perturb(D, noise_ratio, nrng)

    layout = BlockLayout([(price_block(t), n_T) for t in range(T)] + [("tau", n_T)])
    tau_id = T
    factors: List[Factor] = []
    for t in range(T):
        factors.append(Factor(const(S_obs[t] - SUPPLY_MEAN), SUPPLY_DENSITY, f"S[{t}]"))
        c = (20.0 - 0.1 * S_obs[t]) / n_T
        for j in range(n_T):
            price = (
                const(c)
                + MultiaffineExpr.unit(tau_id, j, n_T, 0.01 * c)
                - MultiaffineExpr.unit(t, j, n_T)
            )
            factors.append(Factor(price, PRICE_DENSITY, f"P[{t},{j}]"))
            demand = const(200.0 - D_obs[t, j]) + MultiaffineExpr.unit(t, j, n_T, -10.0)
            factors.append(Factor(demand, DEMAND_DENSITY, f"D[{t},{j}]"))
    for j in range(n_T):
        factors.append(
            Factor(MultiaffineExpr.unit(tau_id, j, n_T), NonInformative(), f"tau[{j}]")
        )

    model = MultiaffineModel(layout, factors)
    x_true = np.concatenate([P.ravel(), tau])
    return ProblemInstance(
        model=model,
        x_true=x_true,
        x_init=np.zeros(layout.n),
        metadata={
            "generator": "supply_demand",
            "params": {"T": T, "n_T": n_T, "noise_ratio": noise_ratio, "noise_seed": noise_seed},
            "seed": seed,
            "noise_level": noise_ratio,
        },
        observations={"S": S_obs, "D": D_obs, "S_true": S, "D_true": D},
    )
