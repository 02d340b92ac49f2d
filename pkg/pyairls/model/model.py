import logging
from dataclasses import dataclass
from functools import cached_property
from typing import Dict, List, Optional, Sequence, Tuple, Union

import numpy as np
from scipy import sparse

from ..densities import Density, default_qbar, group_densities
from ..exceptions import ModelError
from .expr import MultiaffineExpr
from .layout import BlockId, BlockLayout

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class Factor:
    """A residual expression paired with the density of its noise."""

    expr: MultiaffineExpr
    density: Density
    label: Optional[str] = None


@dataclass(frozen=True, eq=False)
class LinearizedSystem:
    """Residuals of ``rows`` written as F x_block - C at a fixed iterate."""

    F: np.ndarray
    C: np.ndarray
    block_id: int
    rows: np.ndarray

    def residuals(self, x_block: np.ndarray) -> np.ndarray:
        return self.F @ np.asarray(x_block, dtype=float) - self.C


class _TermTable:
    """Vectorized evaluation of a subset of terms grouped into rows."""

    def __init__(
        self,
        phi: sparse.csr_matrix,
        slots: np.ndarray,
        coeff: np.ndarray,
        term_row: np.ndarray,
        n_rows: int,
    ) -> None:
        self.phi = phi
        self.slots = slots
        self.coeff = coeff
        self.term_row = term_row
        self.n_rows = n_rows
        n_terms = coeff.shape[0]
        self.gather = sparse.csr_matrix(
            (np.ones(n_terms), (term_row, np.arange(n_terms))),
            shape=(n_rows, n_terms),
        )

    def slot_values(self, x: np.ndarray) -> np.ndarray:
        values = self.phi @ x
        return np.append(values, 1.0)[self.slots]

    def residuals(self, x: np.ndarray) -> np.ndarray:
        products = self.coeff * np.prod(self.slot_values(x), axis=1)
        return np.asarray(self.gather @ products)

    def residuals_batch(self, X: np.ndarray) -> np.ndarray:
        """Residuals for each row of X, shape (len(X), n_rows)."""
        values = np.asarray(self.phi @ X.T)
        values = np.vstack([values, np.ones((1, X.shape[0]))])
        products = self.coeff[:, None] * np.prod(values[self.slots], axis=1)
        return np.asarray(self.gather @ products).T


class _BlockView:
    """Precomputed linearization plan for one block."""

    def __init__(
        self,
        block: int,
        rows: np.ndarray,
        table: _TermTable,
        own_terms: np.ndarray,
        own_pos: np.ndarray,
        own_phi: sparse.csr_matrix,
    ) -> None:
        self.block = block
        self.rows = rows
        self.table = table
        self.own_terms = own_terms
        self.own_pos = own_pos
        self.own_phi = own_phi
        self.other_terms = np.setdiff1d(
            np.arange(table.coeff.shape[0]), own_terms
        )
        self.scatter_index = (
            table.term_row[own_terms],
            np.arange(own_terms.shape[0]),
        )

    def system(self, x: np.ndarray) -> Tuple[np.ndarray, np.ndarray]:
        table = self.table
        values = table.slot_values(x)
        products = table.coeff * np.prod(values, axis=1)

        own = values[self.own_terms].copy()
        own[np.arange(own.shape[0]), self.own_pos] = 1.0
        multipliers = table.coeff[self.own_terms] * np.prod(own, axis=1)
        scatter = sparse.csr_matrix(
            (multipliers, self.scatter_index),
            shape=(self.rows.shape[0], self.own_terms.shape[0]),
        )
        F = np.asarray((scatter @ self.own_phi).toarray())

        C = -np.bincount(
            table.term_row[self.other_terms],
            weights=products[self.other_terms],
            minlength=self.rows.shape[0],
        )
        return F, C


class _CompiledModel:
    """Sparse form matrix and term slots shared by all evaluations."""

    def __init__(self, model: "MultiaffineModel") -> None:
        layout = model.layout
        term_factor: List[int] = []
        coeffs: List[float] = []
        term_forms: List[List[int]] = []
        form_blocks: List[int] = []
        rows: List[int] = []
        cols: List[int] = []
        data: List[float] = []

        for h, factor in enumerate(model.factors):
            for m, term in enumerate(factor.expr.terms):
                ids = []
                for form in term.factors:
                    block = layout.index(form.block)
                    size = layout.size(block)
                    if form.size != size:
                        raise ModelError(
                            f"factor {h}, term {m}: vector for block "
                            f"'{layout.name(block)}' has length {form.size}, "
                            f"expected {size}"
                        )
                    k = len(form_blocks)
                    form_blocks.append(block)
                    nz = np.flatnonzero(form.vector)
                    rows.extend([k] * nz.shape[0])
                    cols.extend((nz + layout.offsets[block]).tolist())
                    data.extend(form.vector[nz].tolist())
                    ids.append(k)
                term_factor.append(h)
                coeffs.append(term.coeff)
                term_forms.append(ids)

        self.n_forms = len(form_blocks)
        self.phi = sparse.csr_matrix(
            (data, (rows, cols)), shape=(self.n_forms, layout.n)
        )
        self.form_blocks = np.asarray(form_blocks, dtype=int)
        self.term_factor = np.asarray(term_factor, dtype=int)
        self.coeff = np.asarray(coeffs, dtype=float)
        degree = max([len(ids) for ids in term_forms] + [1])
        self.slots = np.full((len(term_forms), degree), self.n_forms, dtype=int)
        for t, ids in enumerate(term_forms):
            self.slots[t, : len(ids)] = ids
        self.slot_blocks = np.append(self.form_blocks, -1)[self.slots]

        self.n_factors = model.n_factors
        self.layout = layout
        self.table = self._table(np.arange(len(term_forms)), np.arange(self.n_factors))
        self._views: Dict[int, _BlockView] = {}

        touching = np.zeros(self.n_factors, dtype=bool)
        touching[self.term_factor[np.any(self.slot_blocks >= 0, axis=1)]] = True
        degenerate = np.flatnonzero(~touching)
        if degenerate.size:
            preview = ", ".join(str(i) for i in degenerate[:10])
            more = "" if degenerate.size <= 10 else ", ..."
            logger.warning(
                "%d factor(s) do not depend on any block and only add a "
                "constant to G: %s%s",
                degenerate.size,
                preview,
                more,
            )
        self.degenerate = degenerate

    def _table(self, terms: np.ndarray, factor_rows: np.ndarray) -> _TermTable:
        row_of = np.full(self.n_factors, -1, dtype=int)
        row_of[factor_rows] = np.arange(factor_rows.shape[0])
        slots = self.slots[terms]
        form_ids = np.unique(slots[slots < self.n_forms])
        local = np.full(self.n_forms + 1, form_ids.shape[0], dtype=int)
        local[form_ids] = np.arange(form_ids.shape[0])
        return _TermTable(
            phi=self.phi[form_ids],
            slots=local[slots],
            coeff=self.coeff[terms],
            term_row=row_of[self.term_factor[terms]],
            n_rows=factor_rows.shape[0],
        )

    def view(self, block: int) -> _BlockView:
        if block in self._views:
            return self._views[block]

        hits = self.slot_blocks == block
        counts = hits.sum(axis=1)
        bad = np.flatnonzero(counts > 1)
        if bad.size:
            t = int(bad[0])
            raise ModelError(
                f"factor {self.term_factor[t]} has a term of degree "
                f"{counts[t]} in block '{self.layout.name(block)}'"
            )
        rows = np.unique(self.term_factor[counts == 1])
        terms = np.flatnonzero(np.isin(self.term_factor, rows))
        table = self._table(terms, rows)
        own_terms = np.flatnonzero(counts[terms] == 1)
        own_pos = np.argmax(hits[terms][own_terms], axis=1)
        own_forms = self.slots[terms][own_terms, own_pos]
        sl = self.layout.slice(block)
        own_phi = sparse.csr_matrix(self.phi[own_forms][:, sl])
        view = _BlockView(block, rows, table, own_terms, own_pos, own_phi)
        self._views[block] = view
        return view


class MultiaffineModel:
    """Block layout plus residual factors, each with its noise density.

    Immutable after construction; evaluation methods take the iterate by
    value and are pure.
    """

    def __init__(
        self,
        layout: BlockLayout,
        factors: Sequence[Union[Factor, Tuple[MultiaffineExpr, Density]]],
        qbar: Optional[int] = None,
    ) -> None:
        parsed = []
        for item in factors:
            parsed.append(item if isinstance(item, Factor) else Factor(*item))
        self.layout = layout
        self.factors: Tuple[Factor, ...] = tuple(parsed)
        self.qbar_explicit = qbar is not None
        self.qbar: int = (
            int(qbar) if qbar is not None else default_qbar(self.densities)
        )

    @property
    def n(self) -> int:
        return self.layout.n

    @property
    def n_factors(self) -> int:
        return len(self.factors)

    @property
    def n_blocks(self) -> int:
        return len(self.layout)

    @property
    def densities(self) -> List[Density]:
        return [f.density for f in self.factors]

    @property
    def heuristic(self) -> bool:
        """True when some non-flat factor is not a GND."""
        return any(not d.is_flat and not d.is_gnd for d in self.densities)

    @cached_property
    def flat_mask(self) -> np.ndarray:
        return np.array([d.is_flat for d in self.densities], dtype=bool)

    @cached_property
    def density_groups(self) -> List[Tuple[Density, np.ndarray]]:
        """Non-flat factor indices grouped by equal density."""
        return [(d, idx) for d, idx in group_densities(self.densities) if not d.is_flat]

    @cached_property
    def _compiled(self) -> _CompiledModel:
        return _CompiledModel(self)

    @property
    def degenerate_rows(self) -> np.ndarray:
        """Factors that depend on no block."""
        return self._compiled.degenerate

    @cached_property
    def informative_rows(self) -> np.ndarray:
        """Non-flat factors that depend on at least one block."""
        keep = ~self.flat_mask
        keep[self.degenerate_rows] = False
        return np.flatnonzero(keep)

    def eval_residuals(self, x: Union[Sequence[float], np.ndarray]) -> np.ndarray:
        arr = self.layout.check_vector(x)
        return self._compiled.table.residuals(arr)

    def eval_residuals_batch(self, X: np.ndarray) -> np.ndarray:
        arr = np.atleast_2d(np.asarray(X, dtype=float))
        if arr.shape[1] != self.n:
            raise ModelError(f"points must have {self.n} columns, got {arr.shape[1]}")
        return self._compiled.table.residuals_batch(arr)

    def block_system(self, x: np.ndarray, block: BlockId) -> LinearizedSystem:
        """Linearization restricted to the factors that touch the block."""
        i = self.layout.index(block)
        arr = self.layout.check_vector(x)
        view = self._compiled.view(i)
        F, C = view.system(arr)
        return LinearizedSystem(F=F, C=C, block_id=i, rows=view.rows)

    def linearize_block(
        self, x: Union[Sequence[float], np.ndarray], block: BlockId
    ) -> LinearizedSystem:
        """F, C such that F x_block - C equals r(x) on every factor that
        depends on some block; degenerate factors are left out."""
        arr = self.layout.check_vector(x)
        local = self.block_system(arr, block)
        i = local.block_id
        rows = np.setdiff1d(np.arange(self.n_factors), self.degenerate_rows)
        F = np.zeros((rows.shape[0], self.layout.size(i)))
        C = -self.eval_residuals(arr)[rows]
        pos = np.searchsorted(rows, local.rows)
        F[pos] = local.F
        C[pos] = local.C
        return LinearizedSystem(F=F, C=C, block_id=i, rows=rows)

    def __repr__(self) -> str:
        return (
            f"MultiaffineModel(blocks={len(self.layout)}, n={self.n}, "
            f"factors={self.n_factors}, qbar={self.qbar})"
        )


def eval_residuals(
    model: MultiaffineModel, x: Union[Sequence[float], np.ndarray]
) -> np.ndarray:
    return model.eval_residuals(x)


def linearize_block(
    model: MultiaffineModel,
    x: Union[Sequence[float], np.ndarray],
    block: BlockId,
) -> LinearizedSystem:
    return model.linearize_block(x, block)
