"""AIRLS: block-wise iteratively reweighted least squares for multiaffine models.

Each sweep visits the blocks in order. For the current block the residuals of
every non-flat factor touching it are linearized as ``F x_i - C``, row weights
are computed from the smoothed residuals at the current iterate, and ``x_i`` is
replaced by the weighted least-squares minimizer. Weights are refreshed after
every block update.

GND factors are smoothed on their unit-scale residual ``u = k r`` with
``k = q^(1/q) / scale``, so that the surrogate ``(u^2 + alpha)^(q/qbar)``
tends to the exact penalty ``q |r/scale|^q`` as ``alpha -> 0`` when
``qbar = 2``. The termination variable and the surrogate objective are the
same quantity.
"""

import logging
import math
import time
from dataclasses import dataclass, field
from enum import Enum
from typing import Callable, List, Literal, Optional, Sequence, Union

import numpy as np
from pydantic import BaseModel, ConfigDict, Field, field_validator

from .config import Config
from .densities import GND
from .exceptions import ModelError, NumericalError
from .model import MultiaffineModel
from .validator import validate_model

logger = logging.getLogger(__name__)

SweepCallback = Callable[[int, np.ndarray], None]


class SolverConfig(BaseModel):
    """Parameters of an AIRLS run."""

    model_config = ConfigDict(frozen=True)

    alpha: float = 1e-3
    tol: float = Field(default=1e-8, gt=0)
    max_sweeps: int = Field(default=1000, ge=1)
    block_order: Union[Literal["ascending", "random"], List[int]] = "ascending"
    seed: int = 0
    rtol: Optional[float] = Field(default=None, gt=0)
    stall_tol: float = Field(default=1e-14, ge=0)
    stall_sweeps: int = Field(default=3, ge=1)

    @field_validator("alpha")
    @classmethod
    def _alpha_positive(cls, v: float) -> float:
        if not (v > 0 and math.isfinite(v)):
            raise ValueError("alpha must be > 0")
        return v

    def with_alpha(self, alpha: float) -> "SolverConfig":
        return SolverConfig(**{**self.model_dump(), "alpha": alpha})


class Termination(str, Enum):
    CONVERGED = "converged"
    MAX_SWEEPS = "max_sweeps"
    STALLED = "stalled"


@dataclass
class SweepRecord:
    sweep: int
    L: float
    Ghat: float
    G: float
    max_block_delta: float
    elapsed_s: float


@dataclass
class SolveResult:
    """Outcome of ``airls_solve``.

    ``trace[0]`` describes ``x_init`` (sweep 0); ``sweeps`` counts the
    completed sweeps. ``epsilon_bound`` is None when the suboptimality
    bound does not apply.
    """

    x_hat: np.ndarray
    trace: List[SweepRecord]
    sweeps: int
    termination: Termination
    epsilon_bound: Optional[float]
    heuristic_mode: bool
    alpha: float
    threads: int = 1
    diagnostics: List[str] = field(default_factory=list)

    @property
    def converged(self) -> bool:
        return self.termination == Termination.CONVERGED

    @property
    def final(self) -> SweepRecord:
        return self.trace[-1]


def weighted_ls_update(
    F: np.ndarray,
    C: np.ndarray,
    w: np.ndarray,
    rtol: Optional[float] = None,
) -> np.ndarray:
    """Minimum-norm minimizer of ||F x - C||^2_W, i.e. (F'WF)^+ F'WC.

    Solved through the SVD of W^(1/2) F; singular values at or below
    ``rtol * sigma_max`` are treated as zero. The default ``rtol`` is
    ``max(M, n) * eps``.
    """
    F = np.asarray(F, dtype=float)
    C = np.asarray(C, dtype=float).ravel()
    w = np.asarray(w, dtype=float).ravel()
    if F.ndim != 2 or F.shape[0] != C.shape[0] or C.shape[0] != w.shape[0]:
        raise ModelError(
            f"dimension mismatch: F {F.shape}, C {C.shape}, w {w.shape}"
        )
    if not (
        np.all(np.isfinite(F)) and np.all(np.isfinite(C)) and np.all(np.isfinite(w))
    ):
        raise NumericalError("non-finite entries in the weighted least-squares system")
    if np.any(w <= 0):
        raise NumericalError("weights must be strictly positive")

    M, n = F.shape
    if M == 0 or n == 0:
        return np.zeros(n)

    sw = np.sqrt(w)
    A = sw[:, None] * F
    b = sw * C
    try:
        U, s, Vt = np.linalg.svd(A, full_matrices=False)
    except np.linalg.LinAlgError as e:
        raise NumericalError(f"SVD did not converge: {e}")

    if rtol is None:
        rtol = max(M, n) * np.finfo(float).eps
    cutoff = rtol * (s[0] if s.size else 0.0)
    keep = s > cutoff
    coef = np.zeros_like(s)
    coef[keep] = (U[:, keep].T @ b) / s[keep]
    return Vt.T @ coef


def irls_weights(model: MultiaffineModel, r: np.ndarray, alpha: float) -> np.ndarray:
    """Row weights for every factor; flat factors get zero."""
    w = np.zeros(model.n_factors)
    for density, idx in model.density_groups:
        w[idx] = density.irls_weight(r[idx], alpha, model.qbar)
    return w


def _check_solvable(model: MultiaffineModel) -> None:
    report = validate_model(model)
    if not report.ok:
        first = report.errors[0]
        raise ModelError(
            f"{first.location}: {first.description}"
            + (
                f" (and {len(report.errors) - 1} more)"
                if len(report.errors) > 1
                else ""
            )
        )


def _block_order(
    model: MultiaffineModel, cfg: SolverConfig, rng: np.random.Generator
) -> List[int]:
    order = cfg.block_order
    if order == "ascending":
        return list(range(model.n_blocks))
    if order == "random":
        return [int(i) for i in rng.permutation(model.n_blocks)]
    blocks = [model.layout.index(i) for i in order]
    if sorted(blocks) != list(range(model.n_blocks)):
        raise ModelError(
            f"block_order must be a permutation of 0..{model.n_blocks - 1}"
        )
    return blocks


def _update_block(
    model: MultiaffineModel, x: np.ndarray, block: int, cfg: SolverConfig
) -> float:
    """Overwrite x_block in place; return the update norm."""
    system = model.block_system(x, block)
    keep = ~model.flat_mask[system.rows]
    F, C = system.F[keep], system.C[keep]
    if F.shape[0] == 0:
        return 0.0

    # residuals of the touching rows, straight from the linearization
    sl = model.layout.slice(block)
    r = F @ x[sl] - C
    rows = system.rows[keep]
    w = np.empty(rows.shape[0])
    for density, idx in model.density_groups:
        mask = np.isin(rows, idx)
        if np.any(mask):
            w[mask] = density.irls_weight(r[mask], cfg.alpha, model.qbar)

    active = w > 0
    try:
        x_new = weighted_ls_update(F[active], C[active], w[active], rtol=cfg.rtol)
    except NumericalError as e:
        raise NumericalError(str(e), block=block)
    if not np.all(np.isfinite(x_new)):
        raise NumericalError("update is not finite", block=block)

    delta = float(np.linalg.norm(x_new - x[sl]))
    x[sl] = x_new
    return delta


def _sweep(
    model: MultiaffineModel,
    x: np.ndarray,
    cfg: SolverConfig,
    order: Sequence[int],
) -> float:
    max_delta = 0.0
    for block in order:
        max_delta = max(max_delta, _update_block(model, x, block, cfg))
    return max_delta


def airls_sweep(
    model: MultiaffineModel,
    x: Union[Sequence[float], np.ndarray],
    cfg: Optional[SolverConfig] = None,
) -> np.ndarray:
    """One pass of block updates; returns the new iterate."""
    cfg = cfg or SolverConfig()
    _check_solvable(model)
    x_new = model.layout.check_vector(x).copy()
    rng = np.random.default_rng(cfg.seed)
    _sweep(model, x_new, cfg, _block_order(model, cfg, rng))
    return x_new


def eval_G(model: MultiaffineModel, x: Union[Sequence[float], np.ndarray]) -> float:
    """Negative log-likelihood; flat priors contribute 0."""
    r = model.eval_residuals(x)
    total = 0.0
    for density, idx in model.density_groups:
        total += float(np.sum(density.neg_log_ratio(r[idx]))) - idx.size * density.log_mode()
    return total


def eval_G_batch(model: MultiaffineModel, X: np.ndarray) -> np.ndarray:
    """eval_G for each row of X."""
    R = model.eval_residuals_batch(X)
    total = np.zeros(R.shape[0])
    for density, idx in model.density_groups:
        total += np.sum(density.neg_log_ratio(R[:, idx]), axis=1)
        total -= idx.size * density.log_mode()
    return total


def _g_at_mode(model: MultiaffineModel) -> float:
    return -sum(idx.size * d.log_mode() for d, idx in model.density_groups)


def eval_Ghat(
    model: MultiaffineModel, x: Union[Sequence[float], np.ndarray], alpha: float
) -> float:
    """Smoothed objective: G at zero residuals plus the smoothed penalties."""
    if not alpha > 0:
        raise ModelError("alpha must be > 0")
    r = model.eval_residuals(x)
    total = _g_at_mode(model)
    for density, idx in model.density_groups:
        total += float(np.sum(density.surrogate(r[idx], alpha, model.qbar)))
    return total


def eval_L(
    model: MultiaffineModel, x: Union[Sequence[float], np.ndarray], alpha: float
) -> float:
    """Termination variable: negative log-likelihood of the modified residuals."""
    return eval_Ghat(model, x, alpha)


def suboptimality_bound(model: MultiaffineModel, alpha: float) -> Optional[float]:
    """Sum of alpha^(q/2) over non-flat factors; None unless qbar = 2 and all GND."""
    if model.qbar != 2:
        return None
    total = 0.0
    for density, idx in model.density_groups:
        if not isinstance(density, GND):
            return None
        total += idx.size * alpha ** (density.q / 2.0)
    return total


def airls_solve(
    model: MultiaffineModel,
    x_init: Union[Sequence[float], np.ndarray],
    cfg: Optional[SolverConfig] = None,
    callback: Optional[SweepCallback] = None,
) -> SolveResult:
    """Run sweeps until the decrease of L falls below tol * (1 + |L|)."""
    cfg = cfg or SolverConfig()
    _check_solvable(model)
    x = model.layout.check_vector(x_init).copy()
    rng = np.random.default_rng(cfg.seed)
    heuristic = model.heuristic
    if heuristic:
        logger.info("non-GND factors present; running in heuristic mode")

    start = time.perf_counter()
    L_prev = eval_L(model, x, cfg.alpha)
    trace = [
        SweepRecord(0, L_prev, L_prev, eval_G(model, x), 0.0, 0.0)
    ]
    diagnostics: List[str] = []
    termination = Termination.MAX_SWEEPS
    still = 0
    sweeps = 0

    for sweep in range(1, cfg.max_sweeps + 1):
        order = _block_order(model, cfg, rng)
        max_delta = _sweep(model, x, cfg, order)
        sweeps = sweep
        L = eval_L(model, x, cfg.alpha)
        G = eval_G(model, x)
        trace.append(
            SweepRecord(sweep, L, L, G, max_delta, time.perf_counter() - start)
        )
        logger.debug(
            "sweep %d: L=%.12g G=%.12g max_delta=%.3g", sweep, L, G, max_delta
        )
        if callback is not None:
            callback(sweep, x.copy())

        decrease = L_prev - L
        if not heuristic and decrease < -1e-9 * (1.0 + abs(L)):
            message = (
                f"L increased at sweep {sweep} by {-decrease:.3e} "
                "with all factors GND"
            )
            logger.warning(message)
            diagnostics.append(message)

        if decrease <= cfg.tol * (1.0 + abs(L)):
            termination = Termination.CONVERGED
            break
        still = still + 1 if max_delta < cfg.stall_tol else 0
        if still >= cfg.stall_sweeps:
            termination = Termination.STALLED
            break
        L_prev = L

    logger.info(
        "AIRLS finished: %s after %d sweeps, L=%.12g",
        termination.value,
        sweeps,
        trace[-1].L,
    )
    return SolveResult(
        x_hat=x,
        trace=trace,
        sweeps=sweeps,
        termination=termination,
        epsilon_bound=suboptimality_bound(model, cfg.alpha),
        heuristic_mode=heuristic,
        alpha=cfg.alpha,
        threads=Config.THREADS,
        diagnostics=diagnostics,
    )


@dataclass
class AlphaDrift:
    alpha: float
    x_alpha: np.ndarray
    x_half: np.ndarray
    drift: float


def alpha_drift(
    model: MultiaffineModel,
    x_init: Union[Sequence[float], np.ndarray],
    cfg: Optional[SolverConfig] = None,
) -> AlphaDrift:
    """Re-solve with alpha halved and report ||x_a - x_a/2|| / (1 + ||x_a||)."""
    cfg = cfg or SolverConfig()
    full = airls_solve(model, x_init, cfg).x_hat
    half = airls_solve(model, x_init, cfg.with_alpha(cfg.alpha / 2.0)).x_hat
    drift = float(np.linalg.norm(full - half) / (1.0 + np.linalg.norm(full)))
    return AlphaDrift(cfg.alpha, full, half, drift)


def suggest_alpha(
    model: MultiaffineModel,
    x_init: Union[Sequence[float], np.ndarray],
    cfg: Optional[SolverConfig] = None,
    rel_change: float = 1e-3,
    max_alpha: float = 1.0,
) -> float:
    """Smallest alpha, stepping up by x10 from machine epsilon, whose
    solution agrees with the next larger alpha within ``rel_change``.

    Returns ``max_alpha`` when no pair agrees.
    """
    cfg = cfg or SolverConfig()
    alpha = float(np.finfo(float).eps)
    previous = airls_solve(model, x_init, cfg.with_alpha(alpha)).x_hat
    while alpha * 10.0 <= max_alpha:
        current = airls_solve(model, x_init, cfg.with_alpha(alpha * 10.0)).x_hat
        change = np.linalg.norm(current - previous) / (1.0 + np.linalg.norm(current))
        logger.debug("alpha %.1e -> %.1e: change %.3e", alpha, alpha * 10, change)
        if change <= rel_change:
            return alpha
        alpha *= 10.0
        previous = current
    return max_alpha
