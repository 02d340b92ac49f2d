"""Block layouts, multiaffine expressions and models."""

from .expr import LinearForm, MultiaffineExpr, ResidualTerm
from .io import dump_problem, load_problem, model_to_dict, parse_problem
from .layout import Block, BlockId, BlockLayout
from .model import (
    Factor,
    LinearizedSystem,
    MultiaffineModel,
    eval_residuals,
    linearize_block,
)

__all__ = [
    "Block",
    "BlockId",
    "BlockLayout",
    "Factor",
    "LinearForm",
    "LinearizedSystem",
    "MultiaffineExpr",
    "MultiaffineModel",
    "ResidualTerm",
    "dump_problem",
    "eval_residuals",
    "linearize_block",
    "load_problem",
    "model_to_dict",
    "parse_problem",
]
