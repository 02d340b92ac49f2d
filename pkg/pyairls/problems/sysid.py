"""Errors-in-variables identification of x_{t+1} = A x_t + B u_t.

The data enter through exponentially weighted autocorrelations of the
measured vectors g_t = [x_{t+1}; x_t; u_t]:

    C = sum_t beta^(T-1-t) g_t g_t',  Y = C[:n_x],  Z = C[n_x:]

The unknowns are Theta = [A, B] and the filtered autocorrelation Z, with
Laplace densities on Theta Z - Y, on Z - Z_measured (scale n_x) and on
Theta - Theta_0 (scale n_x + n_z).
"""

import logging
from typing import List, Optional, Tuple

import numpy as np

from ..baselines import ols_solve
from ..densities import ScaledGND, StandardGND
from ..model import BlockLayout, Factor, MultiaffineExpr, MultiaffineModel
from .base import (
    ProblemInstance,
    check_noise,
    check_positive,
    const,
    noise_rng,
    truth_rng,
)

logger = logging.getLogger(__name__)

MAX_OUTLIER_RATIO = 0.05
MAX_RETRIES = 100
STABILITY_MARGIN = 0.95


def _system(
    n_x: int, n_u: int, dt: float, rng: np.random.Generator
) -> Tuple[np.ndarray, np.ndarray]:
    if n_x == 2:
        A = np.array([[1.0, dt], [0.0, 1.0]])
        if n_u == 1:
            return A, np.array([[dt * dt / 2.0], [dt]])
        return A, rng.normal(size=(n_x, n_u)) * dt
    for attempt in range(MAX_RETRIES):
        A = rng.normal(size=(n_x, n_x)) / np.sqrt(n_x)
        if np.max(np.abs(np.linalg.eigvals(A))) < STABILITY_MARGIN:
            break
        logger.debug("unstable draw %d rejected", attempt)
    else:
        A *= STABILITY_MARGIN / np.max(np.abs(np.linalg.eigvals(A)))
    return A, rng.normal(size=(n_x, n_u))


def autocorrelation(
    x: np.ndarray, u: np.ndarray, beta: float = 1.0
) -> np.ndarray:
    """C for states x (T+1, n_x) and inputs u (T, n_u)."""
    T = u.shape[0]
    G = np.hstack([x[1:], x[:-1], u])
    w = beta ** (T - 1 - np.arange(T))
    return G.T @ (w[:, None] * G)


def gen_eiv_sysid(
    n_x: int = 2,
    n_u: int = 1,
    T: int = 200,
    outlier_ratio: float = 0.0,
    seed: int = 0,
    noise_ratio: float = 0.0,
    noise_seed: Optional[int] = None,
    beta: float = 1.0,
    dt: float = 0.1,
) -> ProblemInstance:
    """Blocks Theta (n_x * n_z, row-major) and Z (n_z * (n_x + n_z), row-major).

    Outliers are uniform on [-m_j, m_j], m_j the mean magnitude of signal j,
    added to a fraction ``outlier_ratio`` of the raw measurements.
    ``noise_ratio`` adds Gaussian noise of std noise_ratio * m_j.
    """
    check_positive(n_x=n_x, T=T)
    if n_u < 0:
        raise ValueError(f"n_u must be >= 0, got {n_u}")
    if not 0 <= outlier_ratio <= MAX_OUTLIER_RATIO:
        raise ValueError(
            f"outlier_ratio must lie in [0, {MAX_OUTLIER_RATIO}], got {outlier_ratio}"
        )
    check_noise("noise_ratio", noise_ratio)
    if not 0 < beta <= 1:
        raise ValueError(f"beta must lie in (0, 1], got {beta}")

    rng = truth_rng(seed)
    A, B = _system(n_x, n_u, dt, rng)
    u = rng.normal(size=(T, n_u))
    x = np.zeros((T + 1, n_x))
    x[0] = rng.normal(size=n_x)
    for t in range(T):
        x[t + 1] = A @ x[t] + B @ u[t]

    nrng = noise_rng(seed, noise_seed)
    raw = [x.copy(), u.copy()]
    for data in raw:
        if data.shape[1] == 0:
            continue
        m = np.mean(np.abs(data), axis=0)
        data += noise_ratio * m * nrng.standard_normal(data.shape)
        hit = nrng.random(data.shape) < outlier_ratio
        data += np.where(hit, nrng.uniform(-1.0, 1.0, data.shape) * m, 0.0)
    x_meas, u_meas = raw

    n_z = n_x + n_u
    width = n_x + n_z
    C_true = autocorrelation(x, u, beta)
    C_meas = autocorrelation(x_meas, u_meas, beta)
    Y_meas, Z_meas = C_meas[:n_x], C_meas[n_x:]
    theta_true = np.hstack([A, B])

    layout = BlockLayout([("Theta", n_x * n_z), ("Z", n_z * width)])
    th, zb = 0, 1
    n_theta, n_zz = n_x * n_z, n_z * width
    factors: List[Factor] = []
    fit = StandardGND(1.0)
    for l in range(n_x):
        for h in range(width):
            expr = const(-Y_meas[l, h])
            for j in range(n_z):
                expr = expr + MultiaffineExpr.unit(th, l * n_z + j, n_theta) * (
                    MultiaffineExpr.unit(zb, j * width + h, n_zz)
                )
            factors.append(Factor(expr, fit, f"fit[{l},{h}]"))
    filt = ScaledGND(1.0, float(n_x))
    for j in range(n_z):
        for h in range(width):
            factors.append(
                Factor(
                    MultiaffineExpr.unit(zb, j * width + h, n_zz) - Z_meas[j, h],
                    filt,
                    f"Z[{j},{h}]",
                )
            )
    prior = ScaledGND(1.0, float(width))
    for k in range(n_theta):
        factors.append(
            Factor(MultiaffineExpr.unit(th, k, n_theta), prior, f"Theta0[{k}]")
        )

    model = MultiaffineModel(layout, factors)
    x_true = np.concatenate([theta_true.ravel(), C_true[n_x:].ravel()])
    x_init = np.concatenate([np.zeros(n_theta), Z_meas.ravel()])
    return ProblemInstance(
        model=model,
        x_true=x_true,
        x_init=x_init,
        metadata={
            "generator": "eiv_sysid",
            "params": {
                "n_x": n_x,
                "n_u": n_u,
                "T": T,
                "outlier_ratio": outlier_ratio,
                "noise_ratio": noise_ratio,
                "noise_seed": noise_seed,
                "beta": beta,
                "dt": dt,
            },
            "seed": seed,
            "noise_level": noise_ratio,
        },
        observations={
            "x": x_meas,
            "u": u_meas,
            "Y": Y_meas,
            "Z": Z_meas,
            "theta": theta_true,
        },
    )


def theta_of(instance: ProblemInstance, x: np.ndarray) -> np.ndarray:
    """Theta = [A, B] as a matrix from a full iterate."""
    n_x = instance.observations["Y"].shape[0]
    return instance.model.layout.split(x)["Theta"].reshape(n_x, -1)


def ols_theta(instance: ProblemInstance) -> np.ndarray:
    """Least-squares Theta from Theta Z = Y, ignoring errors in Z."""
    Y, Z = instance.observations["Y"], instance.observations["Z"]
    return np.vstack([ols_solve(Z.T, Y[l]) for l in range(Y.shape[0])])
