"""Spectral norm of the tax covariance under growing noise, for the three
estimators."""

import logging
from typing import List

from ..exceptions import SamplingError
from ..problems import gen_supply_demand
from ..reports.generator import spectral_norm
from ..solver import SolverConfig, airls_solve
from ..variance import (
    SamplerConfig,
    estimate_covariance,
    estimate_covariance_fast,
    resampling_covariance,
)
from .base import Clock, Curve, SuiteResult

logger = logging.getLogger(__name__)

BLOCK = "tau"


def fig8(seed: int = 0, include_timing: bool = True, quick: bool = False) -> SuiteResult:
    """||Sigma_tau|| against noise ratio for resampling, the sampled
    linearization and its fast variant."""
    T, n_T = 2, 1
    levels = [1e-3, 1e-2] if quick else [1e-3, 3e-3, 1e-2, 3e-2, 1e-1]
    n_resample = 3 if quick else 10
    sampler = SamplerConfig(n_samples=50 if quick else 1000, seed=seed)
    cfg = SolverConfig(seed=seed)
    clock = Clock(include_timing)
    header = ["noise_ratio", "spectral_norm", "elapsed_s"]
    curves = {name: Curve(name, header) for name in ("resampling", "prop1", "fast")}
    skipped: List[float] = []

    for level in levels:
        instance = gen_supply_demand(
            T=T, n_T=n_T, noise_ratio=level, seed=seed, noise_seed=seed
        )
        x_hat = airls_solve(instance.model, instance.x_init, cfg).x_hat

        clock.reset()
        cov = resampling_covariance(
            lambda ns: gen_supply_demand(
                T=T, n_T=n_T, noise_ratio=level, seed=seed, noise_seed=ns
            ),
            BLOCK,
            n_samples=n_resample,
            seed=seed,
            cfg=cfg,
        )
        curves["resampling"].add(level, spectral_norm(cov.Sigma), clock())

        for name, estimator in (
            ("prop1", estimate_covariance),
            ("fast", estimate_covariance_fast),
        ):
            clock.reset()
            try:
                cov = estimator(instance.model, x_hat, BLOCK, sampler, cfg.alpha)
            except SamplingError as e:
                logger.warning("%s at noise %g: %s", name, level, e)
                skipped.append(level)
                continue
            curves[name].add(level, spectral_norm(cov.Sigma), clock())

    metadata = {
        "seed": seed,
        "problem": {"generator": "supply_demand", "T": T, "n_T": n_T},
        "block": BLOCK,
        "noise_ratios": levels,
        "resampling_N_S": n_resample,
        "sampler": sampler.model_dump(),
        "solver": cfg.model_dump(),
        "skipped": skipped,
    }
    return SuiteResult("fig8", list(curves.values()), metadata)
