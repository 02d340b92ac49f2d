"""Problem instances shared by every generator, plus error metrics."""

import json
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any, Dict, Optional, Union

import numpy as np

from ..model import MultiaffineModel, dump_problem
from ..model.expr import MultiaffineExpr

# scale floor for Gaussian factors whose noise level is zero
MIN_NOISE_SCALE = 1e-3


@dataclass
class ProblemInstance:
    """A generated model with its ground truth and starting point.

    ``observations`` keeps the raw data the model was built from so that
    comparators (OLS and friends) can be run on exactly the same data.
    """

    model: MultiaffineModel
    x_true: np.ndarray
    x_init: np.ndarray
    metadata: Dict[str, Any] = field(default_factory=dict)
    observations: Dict[str, np.ndarray] = field(default_factory=dict)

    @property
    def generator(self) -> Optional[str]:
        return self.metadata.get("generator")

    def generator_record(self) -> Dict[str, Any]:
        """The ``generator`` entry of a problem file."""
        return {
            "name": self.metadata["generator"],
            "params": dict(self.metadata.get("params", {})),
            "seed": int(self.metadata.get("seed", 0)),
        }

    def write(self, path: Union[str, Path]) -> Path:
        """Write the problem file and a ``.truth.json`` sidecar; return the
        sidecar path."""
        path = Path(path)
        extra: Dict[str, Any] = {"x_init": [float(v) for v in self.x_init]}
        if "generator" in self.metadata:
            extra["generator"] = self.generator_record()
        dump_problem(self.model, path, extra=extra)
        sidecar = truth_path(path)
        truth = {
            "blocks": self.model.layout.to_list(),
            "x_true": [float(v) for v in self.x_true],
            "metadata": _jsonable(self.metadata),
        }
        with open(sidecar, "w", encoding="utf-8") as f:
            json.dump(truth, f, indent=2)
            f.write("\n")
        return sidecar


def truth_path(problem_path: Union[str, Path]) -> Path:
    path = Path(problem_path)
    return path.with_name(path.stem + ".truth.json")


def _jsonable(value: Any) -> Any:
    if isinstance(value, dict):
        return {str(k): _jsonable(v) for k, v in value.items()}
    if isinstance(value, (list, tuple)):
        return [_jsonable(v) for v in value]
    if isinstance(value, np.ndarray):
        return value.tolist()
    if isinstance(value, np.generic):
        return value.item()
    return value


def truth_rng(seed: int) -> np.random.Generator:
    return np.random.default_rng(seed)


def noise_rng(seed: int, noise_seed: Optional[int]) -> np.random.Generator:
    """Noise stream; a different ``noise_seed`` redraws noise for the same truth."""
    return np.random.default_rng([int(seed), 0 if noise_seed is None else int(noise_seed), 1])


def perturb(
    values: np.ndarray, noise_ratio: float, rng: np.random.Generator
) -> np.ndarray:
    """Multiplicative Gaussian perturbation values * (1 + noise_ratio * N(0, 1))."""
    values = np.asarray(values, dtype=float)
    eps = rng.standard_normal(values.shape)
    if noise_ratio == 0:
        return values.copy()
    return values * (1.0 + noise_ratio * eps)


def check_positive(**dims: Union[int, float]) -> None:
    for name, value in dims.items():
        if value < 1:
            raise ValueError(f"{name} must be >= 1, got {value}")


def check_noise(name: str, value: float) -> None:
    if not (value >= 0 and np.isfinite(value)):
        raise ValueError(f"{name} must be finite and >= 0, got {value}")


def const(c: float) -> MultiaffineExpr:
    return MultiaffineExpr.constant(float(c))


def rrms_error(estimate: np.ndarray, truth: np.ndarray) -> float:
    """Relative root-mean-square error ||estimate - truth|| / ||truth||."""
    estimate = np.asarray(estimate, dtype=float).ravel()
    truth = np.asarray(truth, dtype=float).ravel()
    denom = float(np.linalg.norm(truth))
    err = float(np.linalg.norm(estimate - truth))
    return err / denom if denom > 0 else err


def relative_frobenius_error(estimate: np.ndarray, truth: np.ndarray) -> float:
    estimate = np.asarray(estimate, dtype=float)
    truth = np.asarray(truth, dtype=float)
    denom = float(np.linalg.norm(truth, "fro" if truth.ndim == 2 else None))
    err = float(np.linalg.norm(estimate - truth, "fro" if truth.ndim == 2 else None))
    return err / denom if denom > 0 else err
