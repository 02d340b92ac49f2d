"""Benchmark suites reproducing the published comparisons as CSV curves."""

from typing import Dict, Tuple

from .base import Curve, SuiteFunc, SuiteResult, write_suite
from .convergence import fig4, fig6
from .covariance import fig8
from .robustness import fig1, fig2, fig5, fig10

SUITES: Dict[str, Tuple[SuiteFunc, str]] = {
    "fig1": (fig1, "system identification error vs outlier ratio, AIRLS and OLS"),
    "fig2": (fig2, "admittance error vs noise, OLS, MLE and MAP"),
    "fig4": (fig4, "supply-demand error vs time, AIRLS, ZOGD and grid search"),
    "fig5": (fig5, "supply-demand scaling and robustness, AIRLS and ZOGD"),
    "fig6": (fig6, "supply-demand error per sweep with geometric envelope"),
    "fig8": (fig8, "tax covariance norm vs noise for three estimators"),
    "fig10": (fig10, "water scaling and robustness"),
}


def get_suite(name: str) -> SuiteFunc:
    try:
        return SUITES[name][0]
    except KeyError:
        known = ", ".join(SUITES)
        raise ValueError(f"unknown suite {name!r}; choose one of: {known}")


__all__ = [
    "Curve",
    "SUITES",
    "SuiteResult",
    "get_suite",
    "write_suite",
]
