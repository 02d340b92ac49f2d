"""Convergence on the supply-demand problem: AIRLS against ZOGD and grid
search over wall-clock time, and the AIRLS error trajectory per sweep."""

import logging
from typing import Any, Dict, List

import numpy as np

from ..baselines import ZogdConfig, grid_search_minimize, zogd_minimize
from ..problems import gen_supply_demand, rrms_error
from ..solver import SolverConfig, airls_solve, eval_G, eval_G_batch
from .base import Clock, Curve, SuiteResult

logger = logging.getLogger(__name__)

ZOGD_STEP0 = 0.005
ENVELOPE_RATE = 0.7


def fig4(seed: int = 0, include_timing: bool = True, quick: bool = False) -> SuiteResult:
    """RRMS error against time for AIRLS, ZOGD and grid search (T=2, n_T=1)."""
    instance = gen_supply_demand(T=2, n_T=1, noise_ratio=0.0, seed=seed)
    model, truth = instance.model, instance.x_true
    cfg = SolverConfig(seed=seed)
    clock = Clock(include_timing)

    airls = Curve("airls", ["elapsed_s", "rrms_error"])
    airls.add(0.0, rrms_error(instance.x_init, truth))
    clock.reset()
    airls_solve(
        model,
        instance.x_init,
        cfg,
        callback=lambda k, x: airls.add(clock(), rrms_error(x, truth)),
    )

    zogd = Curve("zogd", ["elapsed_s", "rrms_error"])
    zogd.add(0.0, rrms_error(instance.x_init, truth))
    iters = 2000 if quick else 20000
    every = max(1, iters // 50)
    zcfg = ZogdConfig(step0=ZOGD_STEP0, max_iters=iters, seed=seed)
    clock.reset()

    def record(k: int, x: np.ndarray) -> None:
        if k % every == 0:
            zogd.add(clock(), rrms_error(x, truth))

    zogd_minimize(lambda x: eval_G(model, x), instance.x_init, zcfg, callback=record)

    grid = Curve("grid_search", ["elapsed_s", "rrms_error"])
    # prices and tax within their plausible ranges, no knowledge of the truth
    box = [(0.0, 25.0), (0.0, 25.0), (-10.0, 30.0)]
    for steps in [5, 9] if quick else [5, 9, 17, 33, 65]:
        clock.reset()
        x_grid, _ = grid_search_minimize(
            lambda X: eval_G_batch(model, X), box, steps, vectorized=True
        )
        grid.add(clock(), rrms_error(x_grid, truth))

    metadata: Dict[str, Any] = {
        "seed": seed,
        "problem": {"generator": "supply_demand", "T": 2, "n_T": 1},
        "solver": cfg.model_dump(),
        "zogd": zcfg.model_dump(),
        "grid_box": box,
        "omitted": "sampling-based MLE baseline is not reproduced",
    }
    return SuiteResult("fig4", [airls, zogd, grid], metadata)


def fig6(seed: int = 0, include_timing: bool = True, quick: bool = False) -> SuiteResult:
    """Per-sweep RRMS error trajectory with the geometric envelope e0 * 0.7^k."""
    T, n_T = (40, 2) if quick else (400, 2)
    instance = gen_supply_demand(T=T, n_T=n_T, noise_ratio=0.0, seed=seed)
    truth = instance.x_true
    cfg = SolverConfig(seed=seed)
    clock = Clock(include_timing)

    errors: List[float] = [rrms_error(instance.x_init, truth)]
    times: List[float] = [0.0]
    clock.reset()

    def record(k: int, x: np.ndarray) -> None:
        times.append(clock())
        errors.append(rrms_error(x, truth))

    result = airls_solve(instance.model, instance.x_init, cfg, callback=record)

    airls = Curve("airls", ["elapsed_s", "rrms_error"])
    by_sweep = Curve("airls_by_sweep", ["sweep", "rrms_error"])
    envelope = Curve("envelope", ["sweep", "rrms_error"])
    for k, (t, e) in enumerate(zip(times, errors)):
        airls.add(t, e)
        by_sweep.add(k, e)
        envelope.add(k, errors[0] * ENVELOPE_RATE**k)

    metadata = {
        "seed": seed,
        "problem": {"generator": "supply_demand", "T": T, "n_T": n_T},
        "solver": cfg.model_dump(),
        "sweeps": result.sweeps,
        "termination": result.termination.value,
        "envelope_rate": ENVELOPE_RATE,
    }
    return SuiteResult("fig6", [airls, by_sweep, envelope], metadata)
