"""Zero-mode residual densities, modified residuals and reweighting scalars."""

import math
from abc import ABC, abstractmethod
from dataclasses import dataclass, field
from typing import Any, Callable, Dict, List, Optional, Sequence, Tuple, Union

import numpy as np
from scipy import stats
from scipy.special import gammaln

from .exceptions import DensityError, NumericalError

ArrayLike = Union[float, Sequence[float], np.ndarray]


def _as_array(y: ArrayLike) -> np.ndarray:
    return np.asarray(y, dtype=float)


def _scalar_or_array(value: np.ndarray, like: ArrayLike) -> Any:
    return float(value) if np.ndim(like) == 0 else value


def gnd_log_normalizer(q: float) -> float:
    """log p(0) of the standard GND with exponent q."""
    if not q > 0:
        raise DensityError(f"GND exponent must be > 0, got {q}")
    return float((1.0 + q) / q * math.log(q) - math.log(2.0) - gammaln(1.0 / q))


def gnd_log_density(q: float, y: ArrayLike) -> Any:
    """Log density of the standard GND, p(y) proportional to exp(-q|y|^q)."""
    arr = _as_array(y)
    value = gnd_log_normalizer(q) - q * np.abs(arr) ** q
    return _scalar_or_array(value, y)


class Density(ABC):
    """A residual density with its mode at zero."""

    kind: str = "density"

    @property
    def is_flat(self) -> bool:
        return False

    @property
    def is_gnd(self) -> bool:
        return False

    @abstractmethod
    def neg_log_ratio(self, y: np.ndarray) -> np.ndarray:
        """log(p(0) / p(y)), elementwise and nonnegative."""

    @abstractmethod
    def log_mode(self) -> float:
        """log p(0)."""

    def log_density(self, y: np.ndarray) -> np.ndarray:
        return self.log_mode() - self.neg_log_ratio(y)

    def irls_weight(
        self, r: np.ndarray, alpha: float, qbar: int
    ) -> np.ndarray:
        """Row weights used by the block least-squares update."""
        return np.asarray(weight(self, modified_residual(r, alpha, qbar), qbar))

    def surrogate(self, r: np.ndarray, alpha: float, qbar: int) -> np.ndarray:
        """Smoothed penalty entering the surrogate objective."""
        return self.neg_log_ratio(modified_residual(r, alpha, qbar))

    @abstractmethod
    def to_dict(self) -> Dict[str, Any]:
        """Problem-file representation."""


class GND(Density):
    """Behavior shared by the GND variants."""

    kind = "gnd"
    q: float

    def _check_exponent(self) -> None:
        if not (self.q > 0 and math.isfinite(self.q)):
            raise DensityError(f"GND exponent must be > 0, got {self.q}")

    @property
    def is_gnd(self) -> bool:
        return True

    @property
    def spread(self) -> float:
        return 1.0

    @property
    def unit_scale(self) -> float:
        """Factor mapping a residual to the scale where the penalty is |u|^q."""
        return float(self.q ** (1.0 / self.q) / self.spread)

    def neg_log_ratio(self, y: np.ndarray) -> np.ndarray:
        arr = np.asarray(y, dtype=float)
        return self.q * np.abs(arr / self.spread) ** self.q

    def log_mode(self) -> float:
        return gnd_log_normalizer(self.q) - math.log(self.spread)

    def log_density(self, y: np.ndarray) -> np.ndarray:
        arr = np.asarray(y, dtype=float)
        return gnd_log_density(self.q, arr / self.spread) - math.log(self.spread)

    def irls_weight(
        self, r: np.ndarray, alpha: float, qbar: int
    ) -> np.ndarray:
        # smoothing acts on the unit-scale residual, so the weight carries k^2
        k2 = self.unit_scale ** 2
        return self.q * k2 * (k2 * np.square(r) + alpha) ** (
            self.q / qbar - 1.0
        )

    def surrogate(self, r: np.ndarray, alpha: float, qbar: int) -> np.ndarray:
        k2 = self.unit_scale ** 2
        return (k2 * np.square(r) + alpha) ** (self.q / qbar)

    def sample(
        self, size: Union[int, Tuple[int, ...]], rng: np.random.Generator
    ) -> np.ndarray:
        return sample_gnd(self.q, size, rng, scale=self.spread)


@dataclass(frozen=True)
class StandardGND(GND):
    q: float

    def __post_init__(self) -> None:
        self._check_exponent()

    def to_dict(self) -> Dict[str, Any]:
        return {"type": "gnd", "q": self.q}


@dataclass(frozen=True)
class ScaledGND(GND):
    """GND of y/s, i.e. p(y) = p_std(y/s)/s."""

    q: float
    scale: float

    def __post_init__(self) -> None:
        self._check_exponent()
        if not (self.scale > 0 and math.isfinite(self.scale)):
            raise DensityError(f"GND scale must be > 0, got {self.scale}")

    @property
    def spread(self) -> float:
        return self.scale

    def to_dict(self) -> Dict[str, Any]:
        return {"type": "gnd", "q": self.q, "scale": self.scale}


@dataclass(frozen=True)
class AsymmetricLaplace(Density):
    """p(y) proportional to exp(-rate_pos*max(y,0) - rate_neg*max(-y,0))."""

    rate_pos: float
    rate_neg: float
    kind = "asym_laplace"

    def __post_init__(self) -> None:
        if not (self.rate_pos > 0 and self.rate_neg > 0):
            raise DensityError(
                "asymmetric Laplace rates must be > 0, got "
                f"({self.rate_pos}, {self.rate_neg})"
            )

    def neg_log_ratio(self, y: np.ndarray) -> np.ndarray:
        arr = np.asarray(y, dtype=float)
        return self.rate_pos * np.maximum(arr, 0.0) + self.rate_neg * np.maximum(
            -arr, 0.0
        )

    def log_mode(self) -> float:
        a, b = self.rate_pos, self.rate_neg
        return math.log(a * b / (a + b))

    def to_dict(self) -> Dict[str, Any]:
        return {
            "type": "asym_laplace",
            "rate_pos": self.rate_pos,
            "rate_neg": self.rate_neg,
        }


@dataclass(frozen=True)
class NonInformative(Density):
    """Flat prior; carries no weight and no likelihood."""

    kind = "flat"

    @property
    def is_flat(self) -> bool:
        return True

    def neg_log_ratio(self, y: np.ndarray) -> np.ndarray:
        raise DensityError(
            "flat priors have no likelihood ratio; exclude them upstream"
        )

    def log_mode(self) -> float:
        return 0.0

    def log_density(self, y: np.ndarray) -> np.ndarray:
        return np.zeros_like(np.asarray(y, dtype=float))

    def irls_weight(
        self, r: np.ndarray, alpha: float, qbar: int
    ) -> np.ndarray:
        return np.zeros_like(np.asarray(r, dtype=float))

    def surrogate(self, r: np.ndarray, alpha: float, qbar: int) -> np.ndarray:
        return np.zeros_like(np.asarray(r, dtype=float))

    def to_dict(self) -> Dict[str, Any]:
        return {"type": "flat"}


@dataclass(frozen=True)
class Custom(Density):
    """User-supplied zero-mode density given by y -> log(p(0)/p(y))."""

    func: Callable[[np.ndarray], Any] = field(compare=False)
    name: str = "custom"
    mode_log_density: float = 0.0
    kind = "custom"

    def neg_log_ratio(self, y: np.ndarray) -> np.ndarray:
        arr = np.asarray(y, dtype=float)
        value = np.asarray(np.vectorize(self.func, otypes=[float])(arr))
        if np.any(value < 0) or np.any(np.isnan(value)):
            raise DensityError(
                f"custom density '{self.name}' violates the zero-mode "
                "requirement: log(p(0)/p(y)) must be >= 0"
            )
        return value

    def log_mode(self) -> float:
        return self.mode_log_density

    def __hash__(self) -> int:
        return hash((self.name, id(self.func)))

    def __eq__(self, other: object) -> bool:
        return (
            isinstance(other, Custom)
            and self.func is other.func
            and self.name == other.name
        )

    def to_dict(self) -> Dict[str, Any]:
        raise DensityError(
            f"custom density '{self.name}' cannot be written to a problem file"
        )


def neg_log_ratio(d: Density, y: ArrayLike) -> Any:
    """log(p(0)/p(y)) for a non-flat density."""
    if d.is_flat:
        raise DensityError(
            "flat priors carry zero weight and are excluded upstream"
        )
    return _scalar_or_array(d.neg_log_ratio(_as_array(y)), y)


def modified_residual(r: ArrayLike, alpha: float, qbar: int) -> Any:
    """sgn(r) * (r^2 + alpha)^(1/qbar), with sgn(0) = +1."""
    arr = _as_array(r)
    sign = np.where(arr < 0, -1.0, 1.0)
    value = sign * (np.square(arr) + alpha) ** (1.0 / qbar)
    return _scalar_or_array(value, r)


def weight(d: Density, rho_hat: ArrayLike, qbar: int) -> Any:
    """Reweighting scalar log(p(0)/p(rho)) / |rho|^qbar."""
    rho = _as_array(rho_hat)
    if np.any(rho == 0):
        raise NumericalError(
            "modified residual is zero; alpha must be strictly positive"
        )
    value = neg_log_ratio(d, rho) / np.abs(rho) ** qbar
    return _scalar_or_array(np.asarray(value), rho_hat)


def sample_gnd(
    q: float,
    size: Union[int, Tuple[int, ...]],
    rng: np.random.Generator,
    scale: float = 1.0,
) -> np.ndarray:
    """Draw from the GND with density proportional to exp(-q|y/scale|^q)."""
    if not q > 0:
        raise DensityError(f"GND exponent must be > 0, got {q}")
    # gennorm has density proportional to exp(-|y/s|^beta)
    s = scale * q ** (-1.0 / q)
    return np.asarray(stats.gennorm(beta=q, scale=s).rvs(size=size, random_state=rng))


def density_from_dict(data: Dict[str, Any]) -> Density:
    """Build a density from its problem-file representation."""
    kind = data.get("type")
    if kind == "gnd":
        if "q" not in data:
            raise DensityError("gnd density requires 'q'")
        q = float(data["q"])
        if data.get("scale") is not None:
            return ScaledGND(q, float(data["scale"]))
        return StandardGND(q)
    if kind == "asym_laplace":
        return AsymmetricLaplace(float(data["rate_pos"]), float(data["rate_neg"]))
    if kind == "flat":
        return NonInformative()
    raise DensityError(f"unknown density type: {kind!r}")


def group_densities(
    densities: Sequence[Density],
) -> List[Tuple[Density, np.ndarray]]:
    """Group factor indices by equal density, in order of first appearance."""
    groups: Dict[Density, List[int]] = {}
    for index, density in enumerate(densities):
        groups.setdefault(density, []).append(index)
    return [(d, np.asarray(idx, dtype=int)) for d, idx in groups.items()]


def gnd_exponent(d: Density) -> Optional[float]:
    return d.q if isinstance(d, GND) else None


def default_qbar(densities: Sequence[Density]) -> int:
    exponents = [q for q in map(gnd_exponent, densities) if q is not None]
    if not exponents:
        return 2
    return max(2, int(math.ceil(max(exponents) - 1e-12)))
