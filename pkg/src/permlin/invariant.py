"""Invariant maps under a permutation group: M is invariant iff its columns
agree within each block of the induced partition, so the whole space
compresses to m x k matrices by deleting repeated columns (psi), with inverse
given by right-multiplication with the replication matrix E.

Rank-bounded invariant fitting compresses exactly: M X = psi(M) Xtilde where
Xtilde sums the rows of X within each block, so squared-error minimization
reduces to one unconstrained rank-bounded fit on the compressed problem.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Optional, Sequence

import numpy as np

from .errors import InvarianceError, RankDeficientError, SizeMismatchError
from .linalg import numeric_rank
from .equivariant import determinantal_degree
from .optimize import FitResult, _block_fit, _psd_sqrt_pair, eckart_young, sel_to_target, TIE_TOL
from .perms import (
    Partition,
    Permutation,
    cycle_decomposition,
    finest_common_coarsening,
    induced_partition,
    replication_matrix,
)

__all__ = [
    "InvariantSpace",
    "invariant_space",
    "psi_compress",
    "psi_expand",
    "invariant_dimension",
    "invariant_degree",
    "is_singular_point",
    "fit_invariant",
    "invariant_autoencoder",
    "invariant_project",
]

INVARIANCE_TOL = 1e-8


@dataclass(frozen=True)
class InvariantSpace:
    """Invariant m x n maps of rank <= r; rank caps at k, the block count."""

    m: int
    n: int
    r: int
    partition: Partition

    @property
    def k(self) -> int:
        return self.partition.k

    @property
    def effective_rank(self) -> int:
        return min(self.r, self.partition.k)


def invariant_space(gens: Sequence[Permutation], m: int, n: int, r: int) -> InvariantSpace:
    """The single partition (finest common coarsening) characterizes the space."""
    if not gens:
        raise SizeMismatchError("need at least one generator")
    if any(g.n != n for g in gens):
        raise SizeMismatchError("generators do not act on [n]")
    if not 0 <= r <= min(m, n):
        raise SizeMismatchError(f"rank bound {r} outside 0..{min(m, n)}")
    part = finest_common_coarsening([induced_partition(cycle_decomposition(g)) for g in gens])
    return InvariantSpace(m, n, r, part)


def psi_compress(m_mat: np.ndarray, part: Partition, tol: float = INVARIANCE_TOL) -> np.ndarray:
    """Keep one column per block (the smallest label), after checking the
    columns within each block agree within tol * (1 + ||M||_F)."""
    m_mat = np.asarray(m_mat, dtype=float)
    if m_mat.shape[1] != part.n:
        raise SizeMismatchError(f"matrix has {m_mat.shape[1]} columns, partition needs {part.n}")
    bound = tol * (1.0 + np.linalg.norm(m_mat))
    cols = []
    for i, block in enumerate(part.blocks):
        sub = m_mat[:, [j - 1 for j in block]]
        dev = np.abs(sub - sub[:, :1]).max(initial=0.0)
        if dev > bound:
            raise InvarianceError(f"columns of block {i} differ by {dev:.3e} (> {bound:.3e})")
        cols.append(sub[:, 0])
    return np.column_stack(cols)


def psi_expand(compact: np.ndarray, part: Partition) -> np.ndarray:
    compact = np.asarray(compact, dtype=float)
    if compact.shape[1] != part.k:
        raise SizeMismatchError(f"compact matrix has {compact.shape[1]} columns, expected k={part.k}")
    return compact @ replication_matrix(part)


def invariant_dimension(space: InvariantSpace) -> int:
    r = space.effective_rank
    return r * (space.m + space.k - r)


def invariant_degree(space: InvariantSpace) -> int:
    """Degree of the compressed determinantal variety, in exact integers."""
    return determinantal_degree(space.m, space.k, space.effective_rank)


def is_singular_point(space: InvariantSpace, m_mat: np.ndarray, tol: float = INVARIANCE_TOL) -> bool:
    """Singular iff the compressed rank drops below the effective rank bound."""
    compact = psi_compress(m_mat, space.partition, tol)
    if space.effective_rank >= min(space.m, space.k):
        return False
    return numeric_rank(compact) < space.effective_rank


def fit_invariant(
    x: np.ndarray,
    y: np.ndarray,
    space: InvariantSpace,
    ridge: Optional[float] = None,
    tie_tol: float = TIE_TOL,
) -> FitResult:
    """Minimize ||M X - Y||_F^2 over the invariant space, by Eckart-Young on
    the compressed problem (row sums of X per block, weight Xt Xt^T)."""
    x = np.asarray(x, dtype=float)
    y = np.asarray(y, dtype=float)
    if x.shape[0] != space.n or y.shape[0] != space.m:
        raise SizeMismatchError(
            f"data shapes {x.shape}, {y.shape} do not match the {space.m} x {space.n} space"
        )
    if ridge is None and numeric_rank(x) < space.n:
        raise RankDeficientError(f"rank(X X^T) < {space.n}; supply more data or a ridge")
    E = replication_matrix(space.partition).astype(float)
    xt = E @ x  # row sums per block; M X = psi(M) Xt exactly
    u, w = sel_to_target(xt, y, ridge)
    wh, whi = _psd_sqrt_pair(w)
    ey = eckart_young(u @ wh, space.effective_rank, tie_tol=tie_tol)
    compact = ey.truncated @ whi
    minimizer = psi_expand(compact, space.partition)
    loss = float(np.linalg.norm(minimizer @ x - y) ** 2)
    s = np.array(ey.kept + ey.dropped)
    blk = _block_fit(("invariant", 1, 1), space.effective_rank, s, tie_tol)
    constant = float(np.linalg.norm(y) ** 2 - np.trace(u @ w @ u.T))
    return FitResult(minimizer, loss, "invariant", (blk,), ridge, None, constant)


def invariant_autoencoder(
    space: InvariantSpace, m_mat: np.ndarray, tol: float = INVARIANCE_TOL
) -> tuple[np.ndarray, np.ndarray]:
    """Factor an invariant matrix as decoder @ encoder with the weight-shared
    encoder B' E (columns tied within each block).

    At full rank the factors are exactly (compressed matrix, E); below it the
    compressed matrix is split through its SVD.  Rank above the bound is
    rejected.
    """
    compact = psi_compress(m_mat, space.partition, tol)
    r = space.effective_rank
    if numeric_rank(compact) > r:
        raise InvarianceError(f"matrix rank exceeds the bound {r}")
    E = replication_matrix(space.partition).astype(float)
    if r == space.k:
        return compact, E
    if not np.any(compact):
        return np.zeros((space.m, r)), E[:r, :]
    u1, s, v1t = np.linalg.svd(compact)
    decoder = u1[:, :r] * s[:r]
    encoder = v1t[:r, :] @ E
    return decoder, encoder


def invariant_project(m_mat: np.ndarray, part: Partition) -> np.ndarray:
    """Frobenius-orthogonal projection onto the invariant linear space:
    average the columns within each block."""
    m_mat = np.asarray(m_mat, dtype=float)
    out = np.empty_like(m_mat)
    for block in part.blocks:
        idx = [j - 1 for j in block]
        out[:, idx] = m_mat[:, idx].mean(axis=1, keepdims=True)
    return out
