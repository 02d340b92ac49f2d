"""Per-block covariance of the AIRLS estimate.

``estimate_covariance`` samples the other blocks around the estimate,
linearizes the model in the chosen block at every sample and combines the
conditional covariances with the law of total variance, each sample weighted
by its likelihood. ``estimate_covariance_fast`` shares one pseudoinverse
across samples through a first-order expansion. ``resampling_covariance`` is
the brute-force reference: redraw the noise, re-solve, take the empirical
covariance.
"""

import logging
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from typing import Callable, List, Optional, Sequence, Tuple, Union

import numpy as np
from pydantic import BaseModel, ConfigDict, field_validator
from scipy.linalg import pinvh
from scipy.special import logsumexp

from .config import Config
from .exceptions import AirlsError, ModelError, SamplingError
from .model import BlockId, MultiaffineModel
from .problems.base import ProblemInstance
from .solver import SolverConfig, airls_solve, eval_G_batch, irls_weights

logger = logging.getLogger(__name__)

# below this, the summed sample likelihood (relative to the estimate) is noise
MIN_WEIGHT_SUM = 1e-300


class SamplerConfig(BaseModel):
    """Gaussian proposal around the estimate of the other blocks.

    ``scale`` is a per-coordinate standard deviation, a scalar, or None for
    the conditional standard deviation of each coordinate at the estimate
    (see ``conditional_scale``). A zero scale places every sample at the
    estimate.
    """

    model_config = ConfigDict(frozen=True)

    n_samples: int = 1000
    scale: Optional[Union[float, List[float]]] = None
    seed: int = 0

    @field_validator("n_samples")
    @classmethod
    def _enough_samples(cls, v: int) -> int:
        if v < 2:
            raise ValueError("N_S ≥ 2 required")
        return v

    @field_validator("scale")
    @classmethod
    def _scale_nonnegative(
        cls, v: Optional[Union[float, List[float]]]
    ) -> Optional[Union[float, List[float]]]:
        if v is None:
            return v
        values = np.atleast_1d(np.asarray(v, dtype=float))
        if not np.all(np.isfinite(values)) or np.any(values < 0):
            raise ValueError("scale must be finite and >= 0")
        return v


@dataclass
class CovarianceEstimate:
    Sigma: np.ndarray
    method: str
    n_samples: int
    block: int
    effective_weight_sum: float = float("nan")
    raw_asymmetry: float = 0.0


def _psd(Sigma: np.ndarray) -> Tuple[np.ndarray, float]:
    """Symmetrize, floor eigenvalues at 0; also return the raw asymmetry."""
    norm = float(np.max(np.abs(Sigma))) if Sigma.size else 0.0
    asym = float(np.max(np.abs(Sigma - Sigma.T))) / norm if norm > 0 else 0.0
    sym = 0.5 * (Sigma + Sigma.T)
    if not sym.size:
        return sym, asym
    vals, vecs = np.linalg.eigh(sym)
    if np.all(vals >= 0):
        return sym, asym
    out = (vecs * np.maximum(vals, 0.0)) @ vecs.T
    return 0.5 * (out + out.T), asym


def _block_moments(
    model: MultiaffineModel, x: np.ndarray, block: int, alpha: float
) -> Tuple[np.ndarray, float, np.ndarray]:
    """F'WF, Var of the weighted residuals, and F'W^(1/2) times their mean.

    The residual statistics run over every informative factor of the model,
    rows that do not touch the block included; F'WF and F'W^(1/2) only see
    the rows that do.
    """
    n_i = model.layout.size(block)
    informative = model.informative_rows
    if informative.shape[0] == 0:
        return np.zeros((n_i, n_i)), 0.0, np.zeros(n_i)

    r = model.eval_residuals(x)
    w = irls_weights(model, r, alpha)
    e = np.sqrt(w[informative]) * r[informative]

    system = model.block_system(x, block)
    rows = system.rows[~model.flat_mask[system.rows]]
    F = system.F[~model.flat_mask[system.rows]]
    A = F.T @ (w[rows][:, None] * F)
    return A, float(np.var(e)), (F.T @ np.sqrt(w[rows])) * float(np.mean(e))


def _pinv(A: np.ndarray) -> np.ndarray:
    if not A.size:
        return A.copy()
    return pinvh(A, atol=0.0, rtol=A.shape[0] * np.finfo(float).eps)


def conditional_scale(
    model: MultiaffineModel,
    x_hat: Union[Sequence[float], np.ndarray],
    alpha: float = 1e-3,
) -> np.ndarray:
    """Per-coordinate std of every block given the others at the estimate.

    Block j gets sqrt(diag(sigma^2 (F_j' W F_j)^+)), the conditional term of
    the estimator evaluated at x_hat. Zero for a noise-free fit.
    """
    x_hat = model.layout.check_vector(x_hat)
    scale = np.zeros(model.n)
    for j in range(model.n_blocks):
        A, var, _ = _block_moments(model, x_hat, j, alpha)
        scale[model.layout.slice(j)] = np.sqrt(
            np.clip(np.diag(var * _pinv(A)), 0.0, None)
        )
    return scale


def _proposal_scale(
    model: MultiaffineModel,
    x_hat: np.ndarray,
    others: np.ndarray,
    sampler: SamplerConfig,
    alpha: float,
) -> np.ndarray:
    if sampler.scale is None:
        return conditional_scale(model, x_hat, alpha)[others]
    scale = np.atleast_1d(np.asarray(sampler.scale, dtype=float))
    if scale.shape[0] == 1:
        return np.full(others.shape[0], scale[0])
    if scale.shape[0] == model.n:
        return scale[others]
    if scale.shape[0] != others.shape[0]:
        raise ModelError(
            f"scale must have 1, {others.shape[0]} or {model.n} entries, "
            f"got {scale.shape[0]}"
        )
    return scale


def _draw_samples(
    model: MultiaffineModel,
    x_hat: np.ndarray,
    block: int,
    sampler: SamplerConfig,
    alpha: float,
) -> np.ndarray:
    others = model.layout.complement(block)
    scale = _proposal_scale(model, x_hat, others, sampler, alpha)
    logger.debug(
        "proposal scale for block %d: max %.3g", block, float(np.max(scale, initial=0.0))
    )
    seeds = np.random.SeedSequence(sampler.seed).spawn(sampler.n_samples)
    X = np.tile(x_hat, (sampler.n_samples, 1))
    for k, seq in enumerate(seeds):
        rng = np.random.default_rng(seq)
        X[k, others] += scale * rng.standard_normal(others.shape[0])
    return X


def _likelihood_weights(
    model: MultiaffineModel, x_hat: np.ndarray, X: np.ndarray
) -> Tuple[np.ndarray, float]:
    """Normalized sample weights and their unnormalized sum relative to x_hat."""
    log_p = -eval_G_batch(model, X)
    log_p_hat = -float(eval_G_batch(model, x_hat[None, :])[0])
    log_total = float(logsumexp(log_p - log_p_hat))
    if not np.isfinite(log_total) or log_total < np.log(MIN_WEIGHT_SUM):
        logger.warning(
            "sample likelihoods collapsed (log sum %.3g); shrink the scale",
            log_total,
        )
        raise SamplingError(
            "proposal too wide: all samples fall in a negligible-likelihood "
            "region; reduce the sampler scale"
        )
    pi = np.exp(log_p - log_p_hat - log_total)
    return pi, float(np.exp(log_total)) if log_total < 700 else float("inf")


def _map_samples(
    fn: Callable[[np.ndarray], Tuple[np.ndarray, float, np.ndarray]],
    X: np.ndarray,
) -> List[Tuple[np.ndarray, float, np.ndarray]]:
    if Config.THREADS > 1:
        with ThreadPoolExecutor(max_workers=Config.THREADS) as pool:
            return list(pool.map(fn, X))
    return [fn(x) for x in X]


def _total_variance(
    pi: np.ndarray,
    conditional: Sequence[np.ndarray],
    means: Sequence[np.ndarray],
) -> np.ndarray:
    n_i = means[0].shape[0]
    second = np.zeros((n_i, n_i))
    first = np.zeros(n_i)
    # fixed-order reduction
    for p, cov, mu in zip(pi, conditional, means):
        second += p * (cov + np.outer(mu, mu))
        first += p * mu
    return second - np.outer(first, first)


def _estimate(
    model: MultiaffineModel,
    x_hat: Union[Sequence[float], np.ndarray],
    block: BlockId,
    sampler: Optional[SamplerConfig],
    alpha: float,
    fast: bool,
) -> CovarianceEstimate:
    sampler = sampler or SamplerConfig()
    x_hat = model.layout.check_vector(x_hat)
    i = model.layout.index(block)

    X = _draw_samples(model, x_hat, i, sampler, alpha)
    pi, weight_sum = _likelihood_weights(model, x_hat, X)
    moments = _map_samples(lambda x: _block_moments(model, x, i, alpha), X)

    if fast:
        A0, _, _ = _block_moments(model, x_hat, i, alpha)
        P0 = _pinv(A0)
        pinvs = [P0 - (A - A0) for A, _, _ in moments]
    else:
        pinvs = [_pinv(A) for A, _, _ in moments]

    conditional = [var * P for P, (_, var, _) in zip(pinvs, moments)]
    means = [P @ g for P, (_, _, g) in zip(pinvs, moments)]
    Sigma, asym = _psd(_total_variance(pi, conditional, means))
    return CovarianceEstimate(
        Sigma=Sigma,
        method="fast" if fast else "prop1",
        n_samples=sampler.n_samples,
        block=i,
        effective_weight_sum=weight_sum,
        raw_asymmetry=asym,
    )


def estimate_covariance(
    model: MultiaffineModel,
    x_hat: Union[Sequence[float], np.ndarray],
    block: BlockId,
    sampler: Optional[SamplerConfig] = None,
    alpha: float = 1e-3,
) -> CovarianceEstimate:
    """Likelihood-weighted total-variance estimate of Cov[x_block].

    ``alpha`` must match the solve that produced ``x_hat``; the weights are
    the solver's row weights at each sample.
    """
    return _estimate(model, x_hat, block, sampler, alpha, fast=False)


def estimate_covariance_fast(
    model: MultiaffineModel,
    x_hat: Union[Sequence[float], np.ndarray],
    block: BlockId,
    sampler: Optional[SamplerConfig] = None,
    alpha: float = 1e-3,
) -> CovarianceEstimate:
    """As ``estimate_covariance`` with a single pseudoinverse at x_hat.

    Each sample's pseudoinverse is replaced by P0 - (A_k - A0), where A0 and
    P0 belong to the unperturbed estimate. Tends to overestimate at high
    noise.
    """
    return _estimate(model, x_hat, block, sampler, alpha, fast=True)


ProblemFactory = Callable[[int], ProblemInstance]


def resampling_covariance(
    problem_generator: ProblemFactory,
    block: BlockId,
    n_samples: int = 10,
    seed: int = 0,
    cfg: Optional[SolverConfig] = None,
) -> CovarianceEstimate:
    """Empirical covariance of x_block over re-solves with fresh noise.

    ``problem_generator`` maps a noise seed to a problem instance with the
    same ground truth. Both moments are normalized by ``n_samples``.
    """
    if n_samples < 2:
        raise SamplingError("N_S ≥ 2 required")
    noise_seeds = np.random.SeedSequence(seed).generate_state(n_samples)
    estimates = []
    index = 0
    for k, noise_seed in enumerate(noise_seeds):
        try:
            instance = problem_generator(int(noise_seed))
            index = instance.model.layout.index(block)
            result = airls_solve(instance.model, instance.x_init, cfg)
        except AirlsError as e:
            raise SamplingError(f"sample {k}: solve failed: {e}")
        estimates.append(result.x_hat[instance.model.layout.slice(index)])

    samples = np.vstack(estimates)
    centered = samples - samples.mean(axis=0)
    Sigma, asym = _psd(centered.T @ centered / n_samples)
    return CovarianceEstimate(
        Sigma=Sigma,
        method="resampling",
        n_samples=n_samples,
        block=index,
        raw_asymmetry=asym,
    )
