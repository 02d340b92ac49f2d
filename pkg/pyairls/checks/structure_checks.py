import math
from collections import Counter
from typing import List

import numpy as np

from ..densities import Custom, GND
from ..model import MultiaffineModel
from .base import ModelCheck, ModelViolation


class DimensionCheck(ModelCheck):
    """Every linear form must reference a declared block with matching size."""

    def __init__(self) -> None:
        super().__init__(
            check_id="dimensions",
            description="Linear forms match the block layout",
        )

    def check(self, model: MultiaffineModel) -> List[ModelViolation]:
        violations = []
        layout = model.layout
        self.elements_checked = 0
        for h, factor in enumerate(model.factors):
            for m, term in enumerate(factor.expr.terms):
                self.elements_checked += 1
                if not math.isfinite(term.coeff):
                    violations.append(
                        ModelViolation(
                            check_id=self.check_id,
                            severity="error",
                            description="non-finite coefficient",
                            factor_index=h,
                            term_index=m,
                        )
                    )
                for form in term.factors:
                    if not 0 <= form.block < len(layout):
                        violations.append(
                            ModelViolation(
                                check_id=self.check_id,
                                severity="error",
                                description=f"unknown block index {form.block}",
                                factor_index=h,
                                term_index=m,
                                suggested_fix="Declare the block in the layout",
                            )
                        )
                        continue
                    size = layout.size(form.block)
                    if form.size != size:
                        violations.append(
                            ModelViolation(
                                check_id=self.check_id,
                                severity="error",
                                description=(
                                    f"vector for block {layout.name(form.block)} "
                                    f"has length {form.size}, expected {size}"
                                ),
                                factor_index=h,
                                term_index=m,
                            )
                        )
        return violations


class MultiaffinityCheck(ModelCheck):
    """No monomial may contain two linear forms on the same block."""

    def __init__(self) -> None:
        super().__init__(
            check_id="multiaffinity",
            description="Each term is affine in every block",
        )

    def check(self, model: MultiaffineModel) -> List[ModelViolation]:
        violations = []
        self.elements_checked = 0
        for h, factor in enumerate(model.factors):
            for m, term in enumerate(factor.expr.terms):
                self.elements_checked += 1
                for block, degree in sorted(Counter(term.blocks).items()):
                    if degree < 2:
                        continue
                    if 0 <= block < len(model.layout):
                        name = model.layout.name(block)
                    else:
                        name = str(block)
                    violations.append(
                        ModelViolation(
                            check_id=self.check_id,
                            severity="error",
                            description=f"degree {degree} in block {name}",
                            factor_index=h,
                            term_index=m,
                            suggested_fix=(
                                "Split the block or introduce an auxiliary "
                                "block so each term is affine in it"
                            ),
                        )
                    )
        return violations


class ExponentBoundCheck(ModelCheck):
    """qbar must be a positive integer bounding every GND exponent."""

    def __init__(self) -> None:
        super().__init__(
            check_id="qbar",
            description="qbar bounds all GND exponents",
        )

    def check(self, model: MultiaffineModel) -> List[ModelViolation]:
        violations = []
        exponents = [d.q for d in model.densities if isinstance(d, GND)]
        self.elements_checked = len(exponents)
        if model.qbar < 1:
            violations.append(
                ModelViolation(
                    check_id=self.check_id,
                    severity="error",
                    description=f"qbar must be a positive integer, got {model.qbar}",
                )
            )
        for h, d in enumerate(model.densities):
            if isinstance(d, GND) and d.q > model.qbar:
                violations.append(
                    ModelViolation(
                        check_id=self.check_id,
                        severity="error",
                        description=(
                            f"GND exponent {d.q} exceeds qbar={model.qbar}"
                        ),
                        factor_index=h,
                        suggested_fix=f"Set qbar >= {math.ceil(d.q)}",
                    )
                )
        return violations


class DegenerateFactorCheck(ModelCheck):
    """Factors that depend on no block only add a constant."""

    def __init__(self) -> None:
        super().__init__(
            check_id="degenerate-factor",
            description="Factors depend on at least one block",
        )

    def check(self, model: MultiaffineModel) -> List[ModelViolation]:
        violations = []
        self.elements_checked = model.n_factors
        for h, factor in enumerate(model.factors):
            if factor.expr.is_constant and not factor.density.is_flat:
                violations.append(
                    ModelViolation(
                        check_id=self.check_id,
                        severity="warning",
                        description=(
                            "factor does not depend on any block; it is "
                            "dropped from every linearized system"
                        ),
                        factor_index=h,
                    )
                )
        return violations


class ZeroModeCheck(ModelCheck):
    """Custom densities must have their mode at zero."""

    def __init__(self) -> None:
        super().__init__(
            check_id="zero-mode",
            description="Custom densities vanish at zero",
        )

    def check(self, model: MultiaffineModel) -> List[ModelViolation]:
        violations = []
        customs = [
            (h, d) for h, d in enumerate(model.densities) if isinstance(d, Custom)
        ]
        self.elements_checked = len(customs)
        for h, d in customs:
            probe = np.array([0.0, -1.0, 1.0])
            values = np.asarray([d.func(v) for v in probe], dtype=float)
            if abs(values[0]) > 1e-12 or np.any(values < 0):
                violations.append(
                    ModelViolation(
                        check_id=self.check_id,
                        severity="error",
                        description=(
                            f"custom density '{d.name}' must satisfy "
                            "log(p(0)/p(y)) >= 0 with equality at 0"
                        ),
                        factor_index=h,
                    )
                )
        return violations
