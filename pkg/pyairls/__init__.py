"""pyairls - maximum likelihood for multiaffine models with generalized
normal noise."""

from .densities import (
    AsymmetricLaplace,
    Custom,
    NonInformative,
    ScaledGND,
    StandardGND,
    gnd_log_density,
)
from .exceptions import (
    AirlsError,
    DensityError,
    ModelError,
    NumericalError,
    ProblemFormatError,
    SamplingError,
)
from .model import (
    BlockLayout,
    Factor,
    LinearForm,
    MultiaffineExpr,
    MultiaffineModel,
    ResidualTerm,
    load_problem,
)
from .solver import (
    SolveResult,
    SolverConfig,
    airls_solve,
    eval_G,
    eval_Ghat,
    eval_L,
    suboptimality_bound,
)
from .validator import ModelValidator, validate_model
from .variance import (
    SamplerConfig,
    conditional_scale,
    estimate_covariance,
    estimate_covariance_fast,
    resampling_covariance,
)

__version__ = "0.1.0"
__all__ = [
    "AirlsError",
    "AsymmetricLaplace",
    "BlockLayout",
    "Custom",
    "DensityError",
    "Factor",
    "LinearForm",
    "ModelError",
    "ModelValidator",
    "MultiaffineExpr",
    "MultiaffineModel",
    "NonInformative",
    "NumericalError",
    "ProblemFormatError",
    "ResidualTerm",
    "SamplerConfig",
    "SamplingError",
    "ScaledGND",
    "SolveResult",
    "SolverConfig",
    "StandardGND",
    "airls_solve",
    "conditional_scale",
    "estimate_covariance",
    "estimate_covariance_fast",
    "eval_G",
    "eval_Ghat",
    "eval_L",
    "gnd_log_density",
    "load_problem",
    "resampling_covariance",
    "suboptimality_bound",
    "validate_model",
]
