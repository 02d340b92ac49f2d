"""Seeded synthetic problem generators."""

import inspect
from typing import Any, Callable, Dict, Mapping, Optional

from .admittance import gen_admittance
from .base import ProblemInstance, relative_frobenius_error, rrms_error, truth_path
from .factorization import gen_gpca, gen_tensor_regression
from .random_models import gen_random_model
from .supply_demand import gen_supply_demand
from .sysid import gen_eiv_sysid
from .water import gen_water

Generator = Callable[..., ProblemInstance]

GENERATORS: Dict[str, Generator] = {
    "supply_demand": gen_supply_demand,
    "water": gen_water,
    "eiv_sysid": gen_eiv_sysid,
    "admittance": gen_admittance,
    "gpca": gen_gpca,
    "tensor_regression": gen_tensor_regression,
    "random": gen_random_model,
}


def get_generator(name: str) -> Generator:
    try:
        return GENERATORS[name]
    except KeyError:
        known = ", ".join(sorted(GENERATORS))
        raise ValueError(f"unknown generator {name!r}; choose one of: {known}")


def generator_params(name: str) -> Dict[str, Any]:
    """Parameter names of a generator with their defaults."""
    signature = inspect.signature(get_generator(name))
    return {
        p.name: (None if p.default is inspect.Parameter.empty else p.default)
        for p in signature.parameters.values()
    }


def generate(
    name: str,
    params: Optional[Mapping[str, Any]] = None,
    seed: int = 0,
) -> ProblemInstance:
    """Call a registered generator after checking parameter names."""
    params = dict(params or {})
    allowed = generator_params(name)
    unknown = sorted(set(params) - set(allowed))
    if unknown:
        raise ValueError(
            f"unknown parameter(s) for {name}: {', '.join(unknown)}; "
            f"accepted: {', '.join(p for p in allowed if p != 'seed')}"
        )
    params.pop("seed", None)
    return get_generator(name)(**params, seed=seed)


def regenerator(
    record: Mapping[str, Any],
) -> Callable[[int], ProblemInstance]:
    """Factory mapping a noise seed to a fresh draw of a recorded problem."""
    name = record["name"]
    params = dict(record.get("params", {}))
    seed = int(record.get("seed", 0))
    if "noise_seed" not in generator_params(name):
        raise ValueError(f"generator {name} draws no noise; nothing to resample")

    def factory(noise_seed: int) -> ProblemInstance:
        return generate(name, {**params, "noise_seed": noise_seed}, seed=seed)

    return factory


__all__ = [
    "GENERATORS",
    "ProblemInstance",
    "gen_admittance",
    "gen_eiv_sysid",
    "gen_gpca",
    "gen_random_model",
    "gen_supply_demand",
    "gen_tensor_regression",
    "gen_water",
    "generate",
    "generator_params",
    "get_generator",
    "regenerator",
    "relative_frobenius_error",
    "rrms_error",
    "truth_path",
]
