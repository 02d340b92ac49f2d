"""Comparators and oracles: zeroth-order gradient descent, exhaustive grid
search and ordinary least squares."""

import itertools
import logging
import math
from typing import Callable, List, Optional, Sequence, Tuple, Union

import numpy as np
from pydantic import BaseModel, ConfigDict, Field, field_validator

from .exceptions import GridBudgetError
from .solver import weighted_ls_update

logger = logging.getLogger(__name__)

Objective = Callable[[np.ndarray], float]

GRID_BUDGET = 10**8
GRID_MAX_DIM = 3
_GRID_CHUNK = 10**6


class ZogdConfig(BaseModel):
    """Step schedule step0 * decay^k; ``mu=None`` means 1e-4 * (1 + ||x||)."""

    model_config = ConfigDict(frozen=True)

    step0: float = Field(default=1.0, gt=0)
    decay: float = 0.99995
    mu: Optional[float] = Field(default=None, gt=0)
    max_iters: int = Field(default=10000, ge=1)
    seed: int = 0

    @field_validator("decay")
    @classmethod
    def _decay_range(cls, v: float) -> float:
        if not 0 < v < 1:
            raise ValueError("decay must lie in (0, 1)")
        return v


def zogd_minimize(
    objective: Objective,
    x0: Union[Sequence[float], np.ndarray],
    cfg: Optional[ZogdConfig] = None,
    callback: Optional[Callable[[int, np.ndarray], None]] = None,
) -> Tuple[np.ndarray, np.ndarray]:
    """Two-point zeroth-order gradient descent.

    Returns the best point seen and the best-seen objective per iteration
    (entry 0 is the value at x0). Stops early if the objective turns
    non-finite.
    """
    cfg = cfg or ZogdConfig()
    rng = np.random.default_rng(cfg.seed)
    x = np.array(x0, dtype=float).ravel()
    f_best = float(objective(x))
    if not math.isfinite(f_best):
        raise ValueError("objective must be finite at x0")
    x_best = x.copy()
    trace: List[float] = [f_best]
    step = cfg.step0

    for k in range(cfg.max_iters):
        u = rng.standard_normal(x.shape[0])
        u /= np.linalg.norm(u)
        mu = cfg.mu if cfg.mu is not None else 1e-4 * (1.0 + np.linalg.norm(x))
        diff = float(objective(x + mu * u)) - float(objective(x - mu * u))
        x = x - step * diff / (2.0 * mu) * u
        step *= cfg.decay

        f = float(objective(x))
        if not (math.isfinite(f) and math.isfinite(diff) and np.all(np.isfinite(x))):
            logger.warning("ZOGD halted at iteration %d: non-finite objective", k + 1)
            break
        if f < f_best:
            f_best, x_best = f, x.copy()
        trace.append(f_best)
        if callback is not None:
            callback(k + 1, x.copy())

    return x_best, np.asarray(trace)


def grid_search_minimize(
    objective: Objective,
    box: Sequence[Tuple[float, float]],
    steps_per_dim: Union[int, Sequence[int]],
    vectorized: bool = False,
) -> Tuple[np.ndarray, float]:
    """Exhaustive minimization over ``linspace(lo, hi, steps)`` per dimension.

    With ``vectorized=True`` the objective receives a (k, dim) array of
    points and returns k values. Ties go to the lowest flat index.
    """
    dim = len(box)
    if dim == 0 or dim > GRID_MAX_DIM:
        raise GridBudgetError(f"grid dimension must be 1..{GRID_MAX_DIM}, got {dim}")
    if isinstance(steps_per_dim, (int, np.integer)):
        steps = [int(steps_per_dim)] * dim
    else:
        steps = [int(s) for s in steps_per_dim]
    if len(steps) != dim or any(s < 1 for s in steps):
        raise GridBudgetError("steps_per_dim must give a positive count per dimension")
    total = math.prod(steps)
    if total > GRID_BUDGET:
        raise GridBudgetError(
            f"grid of {total} nodes exceeds the budget of {GRID_BUDGET}"
        )
    axes = [np.linspace(lo, hi, s) for (lo, hi), s in zip(box, steps)]

    best_value = math.inf
    best_index = 0
    if vectorized:
        for start in range(0, total, _GRID_CHUNK):
            flat = np.arange(start, min(start + _GRID_CHUNK, total))
            idx = np.unravel_index(flat, steps)
            points = np.column_stack([axes[d][idx[d]] for d in range(dim)])
            values = np.asarray(objective(points), dtype=float)
            values = np.where(np.isnan(values), math.inf, values)
            j = int(np.argmin(values))
            if values[j] < best_value:
                best_value, best_index = float(values[j]), int(flat[j])
    else:
        for flat, point in enumerate(itertools.product(*axes)):
            value = float(objective(np.asarray(point)))
            if value < best_value:
                best_value, best_index = value, flat

    idx = np.unravel_index(best_index, steps)
    x_grid = np.array([axes[d][idx[d]] for d in range(dim)])
    return x_grid, best_value


def ols_solve(F: np.ndarray, C: np.ndarray) -> np.ndarray:
    """Unweighted minimum-norm least squares on the same SVD path as AIRLS."""
    C = np.asarray(C, dtype=float).ravel()
    return weighted_ls_update(F, C, np.ones(C.shape[0]))
