"""Estimation error against noise and outlier levels, and solve time against
problem size."""

import logging
from typing import Dict, List

import numpy as np

from ..baselines import ZogdConfig, zogd_minimize
from ..problems import (
    ProblemInstance,
    gen_admittance,
    gen_eiv_sysid,
    gen_supply_demand,
    gen_water,
    relative_frobenius_error,
    rrms_error,
)
from ..problems.admittance import admittance_of, ols_admittance
from ..problems.sysid import ols_theta, theta_of
from ..solver import SolverConfig, airls_solve, eval_G
from .base import Clock, Curve, SuiteResult, run_seeds, summarize
from .convergence import ZOGD_STEP0

logger = logging.getLogger(__name__)

SUMMARY = ["mean", "min", "max"]


def _solve(instance: ProblemInstance, cfg: SolverConfig) -> np.ndarray:
    return airls_solve(instance.model, instance.x_init, cfg).x_hat


def fig1(seed: int = 0, include_timing: bool = True, quick: bool = False) -> SuiteResult:
    """Relative Frobenius error of the identified double-integrator dynamics
    against outlier ratio."""
    T = 200 if quick else 2000
    ratios = [0.0, 0.01] if quick else [0.0, 0.001, 0.005, 0.01, 0.02, 0.03, 0.04, 0.05]
    repeats = 1 if quick else 5
    cfg = SolverConfig(max_sweeps=200 if quick else 1000, seed=seed)
    header = ["outlier_ratio_pct"] + [f"rel_fro_error_pct_{s}" for s in SUMMARY]
    airls = Curve("airls", header)
    ols = Curve("ols", header)

    for ratio in ratios:
        errs: Dict[str, List[float]] = {"airls": [], "ols": []}
        for run_seed in run_seeds(seed, repeats):
            instance = gen_eiv_sysid(
                n_u=0, T=T, outlier_ratio=ratio, seed=run_seed, noise_seed=run_seed
            )
            theta = instance.observations["theta"]
            x_hat = _solve(instance, cfg)
            errs["airls"].append(
                100.0 * relative_frobenius_error(theta_of(instance, x_hat), theta)
            )
            errs["ols"].append(
                100.0 * relative_frobenius_error(ols_theta(instance), theta)
            )
        airls.add(100.0 * ratio, *summarize(errs["airls"]))
        ols.add(100.0 * ratio, *summarize(errs["ols"]))
        logger.info("outlier ratio %g done", ratio)

    metadata = {
        "seed": seed,
        "problem": {"generator": "eiv_sysid", "T": T, "n_x": 2, "n_u": 0},
        "outlier_ratios": ratios,
        "repeats": repeats,
        "solver": cfg.model_dump(),
    }
    return SuiteResult("fig1", [airls, ols], metadata)


def fig2(seed: int = 0, include_timing: bool = True, quick: bool = False) -> SuiteResult:
    """Admittance error for OLS, MLE (flat prior) and MAP (Laplace prior)."""
    M, N = (3, 10) if quick else (4, 20)
    levels = [1e-3] if quick else [1e-4, 3e-4, 1e-3, 3e-3, 1e-2]
    repeats = 1 if quick else 3
    cfg = SolverConfig(max_sweeps=200 if quick else 1000, seed=seed)
    header = ["noise_ratio"] + [f"relative_error_{s}" for s in SUMMARY]
    curves = {name: Curve(name, header) for name in ("ols", "mle", "map")}

    for level in levels:
        errs: Dict[str, List[float]] = {name: [] for name in curves}
        for run_seed in run_seeds(seed, repeats):
            for name, weight in (("mle", 0.0), ("map", 1.0)):
                instance = gen_admittance(
                    M_nodes=M,
                    N_samples=N,
                    noise_level=level,
                    seed=run_seed,
                    noise_seed=run_seed,
                    prior_weight=weight,
                )
                Y = instance.observations["Y"]
                x_hat = _solve(instance, cfg)
                errs[name].append(
                    relative_frobenius_error(admittance_of(instance, x_hat), Y)
                )
            errs["ols"].append(relative_frobenius_error(ols_admittance(instance), Y))
        for name, curve in curves.items():
            curve.add(level, *summarize(errs[name]))

    metadata = {
        "seed": seed,
        "problem": {"generator": "admittance", "M_nodes": M, "N_samples": N},
        "noise_levels": levels,
        "repeats": repeats,
        "solver": cfg.model_dump(),
    }
    return SuiteResult("fig2", list(curves.values()), metadata)


def fig5(seed: int = 0, include_timing: bool = True, quick: bool = False) -> SuiteResult:
    """Supply-demand: AIRLS time against dimension, and AIRLS and ZOGD error
    against noise ratio."""
    clock = Clock(include_timing)
    cfg = SolverConfig(seed=seed)
    n_T = 2

    scaling = Curve("scaling_airls", ["dimensions", "time_s", "sweeps"])
    for T in [2, 4] if quick else [2, 8, 32, 128, 512]:
        instance = gen_supply_demand(T=T, n_T=n_T, seed=seed)
        clock.reset()
        result = airls_solve(instance.model, instance.x_init, cfg)
        scaling.add(instance.model.layout.n, clock(), result.sweeps)

    levels = [0.0, 1e-2] if quick else [0.0, 1e-3, 3e-3, 1e-2, 3e-2, 1e-1]
    repeats = 1 if quick else 5
    zcfg = ZogdConfig(step0=ZOGD_STEP0, max_iters=500 if quick else 5000, seed=seed)
    header = ["noise_ratio"] + [f"rrms_error_{s}" for s in SUMMARY]
    robust_airls = Curve("robustness_airls", header)
    robust_zogd = Curve("robustness_zogd", header)
    for level in levels:
        errs: Dict[str, List[float]] = {"airls": [], "zogd": []}
        for run_seed in run_seeds(seed, repeats):
            instance = gen_supply_demand(
                T=10, n_T=n_T, noise_ratio=level, seed=run_seed, noise_seed=run_seed
            )
            errs["airls"].append(rrms_error(_solve(instance, cfg), instance.x_true))
            x_zogd, _ = zogd_minimize(
                lambda x: eval_G(instance.model, x), instance.x_init, zcfg
            )
            errs["zogd"].append(rrms_error(x_zogd, instance.x_true))
        robust_airls.add(level, *summarize(errs["airls"]))
        robust_zogd.add(level, *summarize(errs["zogd"]))

    metadata = {
        "seed": seed,
        "problem": {"generator": "supply_demand", "n_T": n_T, "robustness_T": 10},
        "noise_ratios": levels,
        "repeats": repeats,
        "solver": cfg.model_dump(),
        "zogd": zcfg.model_dump(),
    }
    return SuiteResult("fig5", [scaling, robust_airls, robust_zogd], metadata)


def fig10(seed: int = 0, include_timing: bool = True, quick: bool = False) -> SuiteResult:
    """Water: AIRLS time against horizon and error against noise ratio."""
    clock = Clock(include_timing)
    cfg = SolverConfig(seed=seed)

    scaling = Curve("scaling_airls", ["dimensions", "time_s", "sweeps"])
    for T in [5, 10] if quick else [10, 50, 200, 500]:
        instance = gen_water(T=T, seed=seed)
        clock.reset()
        result = airls_solve(instance.model, instance.x_init, cfg)
        scaling.add(instance.model.layout.n, clock(), result.sweeps)

    T_robust = 10 if quick else 50
    levels = [0.0, 1e-2] if quick else [0.0, 1e-4, 1e-3, 1e-2, 1e-1]
    repeats = 1 if quick else 5
    header = ["noise_ratio"] + [f"rrms_error_{s}" for s in SUMMARY]
    robust = Curve("robustness_airls", header)
    for level in levels:
        errs: List[float] = []
        for run_seed in run_seeds(seed, repeats):
            instance = gen_water(
                T=T_robust, noise_ratio=level, seed=run_seed, noise_seed=run_seed
            )
            errs.append(rrms_error(_solve(instance, cfg), instance.x_true))
        robust.add(level, *summarize(errs))
        logger.info("water noise ratio %g done", level)

    metadata = {
        "seed": seed,
        "problem": {"generator": "water", "robustness_T": T_robust},
        "noise_ratios": levels,
        "repeats": repeats,
        "solver": cfg.model_dump(),
    }
    return SuiteResult("fig10", [scaling, robust], metadata)
