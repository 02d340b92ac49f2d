"""Multiaffine expressions as sums of monomials of per-block linear forms."""

from dataclasses import dataclass
from typing import Iterable, Sequence, Tuple, Union

import numpy as np

from ..exceptions import ModelError
from .layout import BlockLayout

Scalar = Union[int, float]


@dataclass(frozen=True, eq=False)
class LinearForm:
    """The linear functional <vector, x_block>."""

    block: int
    vector: np.ndarray

    def __post_init__(self) -> None:
        vec = np.array(self.vector, dtype=float).ravel()
        if not np.all(np.isfinite(vec)):
            raise ModelError(f"linear form on block {self.block} is not finite")
        vec.setflags(write=False)
        object.__setattr__(self, "block", int(self.block))
        object.__setattr__(self, "vector", vec)

    @property
    def size(self) -> int:
        return int(self.vector.shape[0])

    def value(self, layout: BlockLayout, x: np.ndarray) -> float:
        return float(self.vector @ x[layout.slice(self.block)])

    def same_as(self, other: "LinearForm") -> bool:
        return self.block == other.block and np.array_equal(
            self.vector, other.vector
        )


@dataclass(frozen=True, eq=False)
class ResidualTerm:
    """One monomial: coeff times a product of linear forms.

    The raw constructor accepts any factor list so that malformed terms can be
    represented and reported by validation; ``create`` enforces degree <= 1
    per block.
    """

    coeff: float
    factors: Tuple[LinearForm, ...] = ()

    def __post_init__(self) -> None:
        object.__setattr__(self, "coeff", float(self.coeff))
        object.__setattr__(self, "factors", tuple(self.factors))

    @classmethod
    def create(
        cls, coeff: Scalar, factors: Iterable[LinearForm] = ()
    ) -> "ResidualTerm":
        forms = tuple(factors)
        seen = set()
        for form in forms:
            if form.block in seen:
                raise ModelError(
                    f"term has degree 2 in block {form.block}; "
                    "products must be affine in every block"
                )
            seen.add(form.block)
        return cls(float(coeff), forms)

    @property
    def blocks(self) -> Tuple[int, ...]:
        return tuple(f.block for f in self.factors)

    @property
    def is_constant(self) -> bool:
        return not self.factors

    def degree_in(self, block: int) -> int:
        return sum(1 for f in self.factors if f.block == block)

    def value(self, layout: BlockLayout, x: np.ndarray) -> float:
        result = self.coeff
        for form in self.factors:
            result *= form.value(layout, x)
        return result

    def scaled(self, c: Scalar) -> "ResidualTerm":
        return ResidualTerm(self.coeff * float(c), self.factors)

    def same_as(self, other: "ResidualTerm") -> bool:
        return (
            self.coeff == other.coeff
            and len(self.factors) == len(other.factors)
            and all(a.same_as(b) for a, b in zip(self.factors, other.factors))
        )


@dataclass(frozen=True, eq=False)
class MultiaffineExpr:
    """A sum of ResidualTerms; supports +, -, scalar and affine products."""

    terms: Tuple[ResidualTerm, ...] = ()

    def __post_init__(self) -> None:
        object.__setattr__(self, "terms", tuple(self.terms))

    @classmethod
    def constant(cls, c: Scalar) -> "MultiaffineExpr":
        return cls((ResidualTerm(float(c)),))

    @classmethod
    def linear(
        cls,
        block: int,
        vector: Union[Sequence[float], np.ndarray],
        coeff: Scalar = 1.0,
    ) -> "MultiaffineExpr":
        return cls((ResidualTerm(float(coeff), (LinearForm(block, np.asarray(vector)),)),))

    @classmethod
    def unit(
        cls, block: int, offset: int, size: int, coeff: Scalar = 1.0
    ) -> "MultiaffineExpr":
        """coeff * x_block[offset]."""
        vec = np.zeros(size)
        vec[offset] = 1.0
        return cls.linear(block, vec, coeff)

    @property
    def blocks(self) -> Tuple[int, ...]:
        seen = []
        for term in self.terms:
            for b in term.blocks:
                if b not in seen:
                    seen.append(b)
        return tuple(sorted(seen))

    @property
    def is_constant(self) -> bool:
        return all(t.is_constant for t in self.terms)

    def value(self, layout: BlockLayout, x: np.ndarray) -> float:
        return sum((t.value(layout, x) for t in self.terms), 0.0)

    def _coerce(self, other: Union["MultiaffineExpr", Scalar]) -> "MultiaffineExpr":
        if isinstance(other, MultiaffineExpr):
            return other
        if isinstance(other, (int, float, np.floating, np.integer)):
            return MultiaffineExpr.constant(float(other))
        raise TypeError(f"cannot combine MultiaffineExpr with {type(other).__name__}")

    def __add__(self, other: Union["MultiaffineExpr", Scalar]) -> "MultiaffineExpr":
        return MultiaffineExpr(self.terms + self._coerce(other).terms)

    def __radd__(self, other: Scalar) -> "MultiaffineExpr":
        return self._coerce(other) + self

    def __neg__(self) -> "MultiaffineExpr":
        return MultiaffineExpr(tuple(t.scaled(-1.0) for t in self.terms))

    def __sub__(self, other: Union["MultiaffineExpr", Scalar]) -> "MultiaffineExpr":
        return self + (-self._coerce(other))

    def __rsub__(self, other: Scalar) -> "MultiaffineExpr":
        return self._coerce(other) - self

    def __mul__(self, other: Union["MultiaffineExpr", Scalar]) -> "MultiaffineExpr":
        if not isinstance(other, MultiaffineExpr):
            c = float(other)
            return MultiaffineExpr(tuple(t.scaled(c) for t in self.terms))
        products = []
        for a in self.terms:
            for b in other.terms:
                products.append(
                    ResidualTerm.create(a.coeff * b.coeff, a.factors + b.factors)
                )
        return MultiaffineExpr(tuple(products))

    def __rmul__(self, other: Scalar) -> "MultiaffineExpr":
        return self * other

    def same_as(self, other: "MultiaffineExpr") -> bool:
        return len(self.terms) == len(other.terms) and all(
            a.same_as(b) for a, b in zip(self.terms, other.terms)
        )
