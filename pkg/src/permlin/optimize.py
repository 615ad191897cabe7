"""Squared-error loss minimization machinery.

With data matrices X (n x d) and Y (m x d) and rank(X X^T) = n, minimizing
||M X - Y||_F^2 over any set of matrices equals minimizing the weighted
distance ||M - U||_W^2 with U = Y X^T (X X^T)^{-1} and W = X X^T.  Over all
rank <= r matrices the weighted problem reduces to plain Eckart-Young on
U W^{1/2} (right-multiplication by W^{1/2} maps the rank variety to itself).

For equivariant fits the algorithm is:

  1. conjugate the data by the orthogonal base change Q and form U;
  2. project U onto the block-diagonal commutant, orthogonally with respect
     to <.,.>_W: per block, U_b = (U W)_{bb} (W_{bb})^{-1};
  3. per block and candidate rank, solve the weighted rank-bounded problem
     (Eckart-Young after the W^{1/2} trick); realization blocks are first
     projected onto the realization pattern, after which both target and the
     doubled weight S = W_bb + P W_bb P^T decode to complex matrices and the
     problem is complex Eckart-Young with a Hermitian weight.

The per-block losses are tails of squared singular values, so the search
over irreducible components only combines cached numbers per candidate.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from itertools import combinations
from typing import Optional, Sequence, Union

import numpy as np
import scipy.linalg

from .errors import (
    ComponentError,
    RankDeficientError,
    SearchLimitError,
    SizeCapError,
    SizeMismatchError,
)
from .linalg import DEFAULT_TOL, numeric_rank, realize
from .equivariant import (
    RankVector,
    _field_blocks,
    _pair_antisym,
    count_components,
    enumerate_components,
    make_rank_vector,
)
from .perms import Permutation
from .spectral import BaseChange, real_base_change

__all__ = [
    "EckartYoungResult",
    "BlockFit",
    "FitResult",
    "eckart_young",
    "sel_to_target",
    "fit_rank_bounded",
    "fit_realization_block",
    "fit_equivariant",
    "ed_degrees",
]

TIE_TOL = 1e-9


@dataclass(frozen=True)
class EckartYoungResult:
    truncated: np.ndarray
    kept: tuple[float, ...]
    dropped: tuple[float, ...]
    boundary_tie: bool
    all_critical: Optional[tuple[np.ndarray, ...]] = None


def eckart_young(
    u: np.ndarray,
    r: int,
    want_all_critical: bool = False,
    tie_tol: float = TIE_TOL,
    max_critical: int = 100_000,
) -> EckartYoungResult:
    """Closest rank <= r matrix in Frobenius norm, via truncated SVD.

    On request, `all_critical` enumerates every subset-truncation (all
    binom(min(m,n), r) critical points of the distance function; they are all
    real).  Ties sigma_r = sigma_{r+1} keep the lowest indices and set the
    boundary flag.
    """
    u = np.asarray(u, dtype=float)
    q = min(u.shape)
    if not 0 <= r <= q:
        raise SizeMismatchError(f"rank {r} outside 0..{q}")
    U1, s, V1t = np.linalg.svd(u)
    trunc = (U1[:, :r] * s[:r]) @ V1t[:r]
    tie = bool(0 < r < q and s[r - 1] - s[r] <= tie_tol * (1.0 + s[0]))
    crit = None
    if want_all_critical:
        n_crit = math.comb(q, r)
        if n_crit > max_critical:
            raise SizeCapError(f"{n_crit} critical points exceed cap {max_critical}")
        crit = tuple(
            (U1[:, list(subset)] * s[list(subset)]) @ V1t[list(subset), :]
            for subset in combinations(range(q), r)
        )
    return EckartYoungResult(trunc, tuple(s[:r]), tuple(s[r:]), tie, crit)


def _psd_sqrt_pair(w: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """Symmetric square root and inverse square root from one eigendecomposition."""
    w = 0.5 * (w + w.T)
    vals, vecs = scipy.linalg.eigh(w)
    floor = DEFAULT_TOL * max(1.0, float(vals.max()))
    if vals.min() < floor:
        raise RankDeficientError(
            f"weight matrix nearly singular (eigenvalue {vals.min():.3e}); supply a ridge"
        )
    root = np.sqrt(vals)
    return (vecs * root) @ vecs.T, (vecs / root) @ vecs.T


def sel_to_target(
    x: np.ndarray,
    y: np.ndarray,
    ridge: Optional[float] = None,
    rank_tol: float = DEFAULT_TOL,
) -> tuple[np.ndarray, np.ndarray]:
    """Return (U, W) with argmin ||M X - Y||_F^2 = argmin ||M - U||_W^2."""
    x = np.asarray(x, dtype=float)
    y = np.asarray(y, dtype=float)
    n = x.shape[0]
    if y.shape[1] != x.shape[1]:
        raise SizeMismatchError(f"X has {x.shape[1]} samples but Y has {y.shape[1]}")
    if ridge is None and numeric_rank(x, rank_tol) < n:
        raise RankDeficientError(
            f"rank(X X^T) < {n}; supply more generic data or a ridge"
        )
    w = x @ x.T
    if ridge is not None:
        if ridge <= 0:
            raise RankDeficientError("ridge must be positive")
        w = w + ridge * np.eye(n)
    u = np.linalg.solve(w, x @ y.T).T
    return u, w


@dataclass(frozen=True)
class BlockFit:
    """Per-block diagnostics: which weighted singular values were kept/dropped."""

    block: tuple[str, int, int]
    rank: int
    kept: tuple[float, ...]
    dropped: tuple[float, ...]
    boundary_tie: bool
    loss: float


@dataclass(frozen=True)
class FitResult:
    minimizer: np.ndarray
    loss: float
    component: Union[RankVector, str]
    per_block: tuple[BlockFit, ...]
    regularization: Optional[float] = None
    candidates: Optional[tuple[tuple[tuple[int, ...], float], ...]] = None
    constant_loss: Optional[float] = None
    component_source: Optional[str] = None


def _block_fit(key, rank, s, tie_tol, extra_loss=0.0) -> BlockFit:
    q = len(s)
    tie = bool(0 < rank < q and s[rank - 1] - s[rank] <= tie_tol * (1.0 + s[0]))
    loss = float(np.sum(s[rank:] ** 2) + extra_loss)
    return BlockFit(key, rank, tuple(s[:rank]), tuple(s[rank:]), tie, loss)


def fit_rank_bounded(
    x: np.ndarray, y: np.ndarray, r: int, ridge: Optional[float] = None
) -> FitResult:
    """Global minimizer of ||M X - Y||_F^2 over all rank <= r matrices.

    A bound at or above min(m, n) is vacuous and gives plain least squares."""
    u, w = sel_to_target(x, y, ridge)
    r = min(r, *u.shape)
    wh, whi = _psd_sqrt_pair(w)
    ey = eckart_young(u @ wh, r)
    minimizer = ey.truncated @ whi
    loss = float(np.linalg.norm(minimizer @ x - y) ** 2)
    s = np.array(ey.kept + ey.dropped)
    blk = _block_fit(("dense", 0, 0), r, s, TIE_TOL)
    constant = float(np.linalg.norm(y) ** 2 - np.trace(u @ w @ u.T))
    return FitResult(minimizer, loss, "unconstrained", (blk,), ridge, None, constant)


def _herm_sqrt_pair(sigma: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """Hermitian PSD square root and inverse square root."""
    sigma = 0.5 * (sigma + sigma.conj().T)
    vals, vecs = scipy.linalg.eigh(sigma)
    floor = DEFAULT_TOL * max(1.0, float(vals.max()))
    if vals.min() < floor:
        raise RankDeficientError(
            f"weight matrix nearly singular (eigenvalue {vals.min():.3e}); supply a ridge"
        )
    root = np.sqrt(vals)
    return (vecs * root) @ vecs.conj().T, (vecs / root) @ vecs.conj().T


def _decode_pattern(a: np.ndarray) -> np.ndarray:
    """Read the complex matrix out of an (exactly) pattern-commuting real one,
    symmetrizing away floating-point noise."""
    re = 0.5 * (a[0::2, 0::2] + a[1::2, 1::2])
    im = 0.5 * (a[1::2, 0::2] - a[0::2, 1::2])
    return re + 1j * im


class _RealizationSolver:
    """Weighted fit on one realization block.

    Project the target onto the realization pattern with respect to <.,.>_W;
    both the projected target and the doubled weight S = W + P W P^T commute
    with the pair structure, so they decode to complex matrices Z0 and a
    Hermitian PSD Sigma with

        || realize(Z) - u ||_W^2 = tr( (Z - Z0) Sigma (Z - Z0)^H ) + const.

    The complex-rank-bounded minimizer is then complex Eckart-Young on
    Z0 Sigma^{1/2}, multiplied back by Sigma^{-1/2}.
    """

    def __init__(self, u_block: np.ndarray, w_block: np.ndarray):
        d2 = u_block.shape[0]
        if d2 % 2 or u_block.shape != (d2, d2) or w_block.shape != (d2, d2):
            raise SizeMismatchError(f"realization block needs even square shape, got {u_block.shape}")
        P = _pair_antisym(d2 // 2)
        S = w_block + P @ w_block @ P.T
        num = u_block @ w_block + P @ u_block @ w_block @ P.T
        u0 = np.linalg.solve(S, num.T).T
        diff = u0 - u_block
        self.base_loss = float(np.trace(diff @ w_block @ diff.T))
        z0 = _decode_pattern(u0)
        sigma = _decode_pattern(S)
        sh, shi = _herm_sqrt_pair(sigma)
        self._shi = shi
        self._u1, self.svals, self._v1t = np.linalg.svd(z0 @ sh)

    def build(self, r: int) -> np.ndarray:
        trunc = (self._u1[:, :r] * self.svals[:r]) @ self._v1t[:r]
        return realize(trunc @ self._shi)


class _PlainSolver:
    """Weighted rank-bounded fit on a free block via the W^{1/2} trick."""

    def __init__(self, u_block: np.ndarray, w_block: np.ndarray):
        self.base_loss = 0.0
        sh, shi = _psd_sqrt_pair(w_block)
        self._shi = shi
        self._u1, self.svals, self._v1t = np.linalg.svd(u_block @ sh)

    def build(self, r: int) -> np.ndarray:
        trunc = (self._u1[:, :r] * self.svals[:r]) @ self._v1t[:r]
        return trunc @ self._shi


def fit_realization_block(u_block: np.ndarray, x_block: np.ndarray, r: int) -> np.ndarray:
    """Minimize ||B - u_block||^2 weighted by x_block x_block^T over realization
    matrices of complex rank <= r; returns the 2d x 2d minimizer.

    The pattern projection and the decoded complex Eckart-Young step happen
    inside the solver; the result satisfies the realization pattern exactly
    and has real rank at most 2r."""
    u_block = np.asarray(u_block, dtype=float)
    x_block = np.asarray(x_block, dtype=float)
    if u_block.shape[0] != x_block.shape[0]:
        raise SizeMismatchError("u_block and x_block row counts differ")
    if 2 * r > u_block.shape[0]:
        raise SizeMismatchError(f"rank {r} exceeds the block's complex size")
    solver = _RealizationSolver(u_block, x_block @ x_block.T)
    return solver.build(r)


def _energy_component(blocks, solvers, r: int) -> tuple[int, ...]:
    """Greedy rank allocation by descending marginal energy per rank unit.

    Heuristic only: mirrors concentrating the budget where the weighted
    singular values carry the most mass; never used unless asked for.
    """
    values = [0] * len(blocks)
    remaining = r
    while remaining > 0:
        best, best_gain = None, -1.0
        for i, (_, _, d, mult) in enumerate(blocks):
            t = values[i]
            if t < d and mult <= remaining:
                gain = float(solvers[i].svals[t] ** 2) / mult
                if gain > best_gain:
                    best, best_gain = i, gain
        if best is None:
            raise ComponentError(
                f"energy heuristic cannot allocate remaining budget {remaining}; name a component"
            )
        values[best] += 1
        remaining -= blocks[best][3]
    return tuple(values)


def fit_equivariant(
    x: np.ndarray,
    y: np.ndarray,
    p: Permutation,
    r: int,
    component: Optional[RankVector] = None,
    search_limit: int = 10**6,
    heuristic: Optional[str] = None,
    ridge: Optional[float] = None,
    base_change: Optional[BaseChange] = None,
    tie_tol: float = TIE_TOL,
) -> FitResult:
    """Minimize ||M X - Y||_F^2 over rank <= r equivariant matrices.

    With `component` given, fits that component only.  Otherwise enumerates
    all admissible components (up to `search_limit`) and returns the best,
    ties broken by the lexicographically smallest rank vector; or, with
    heuristic="energy", fits the single greedily chosen component.
    """
    x = np.asarray(x, dtype=float)
    y = np.asarray(y, dtype=float)
    bc = base_change if base_change is not None else real_base_change(p)
    n = bc.spectrum.n
    if x.shape[0] != n or y.shape[0] != n:
        raise SizeMismatchError(f"equivariant fit needs n x d data with n={n}")
    xt = bc.inverse @ x
    yt = bc.inverse @ y
    u, w = sel_to_target(xt, yt, ridge)
    uw = u @ w

    blocks = _field_blocks(bc.spectrum, "real")
    solvers = []
    u_proj = np.zeros_like(u)
    for (blk, sl) in zip(bc.spectrum.real_blocks, bc.block_slices):
        wbb = w[sl, sl]
        ub = np.linalg.solve(wbb, uw[sl, sl].T).T
        u_proj[sl, sl] = ub
        solvers.append(
            _RealizationSolver(ub, wbb) if blk.kind == "complex_pair" else _PlainSolver(ub, wbb)
        )

    # ||U - Utilde||_W^2, the step-2 projection residual (constant in M)
    diff = u - u_proj
    proj_residual = float(np.trace(diff @ w @ diff.T))
    constant = float(np.linalg.norm(yt) ** 2 - np.trace(u @ w @ u.T)) + proj_residual

    def component_loss(values) -> float:
        return constant + sum(
            solver.base_loss + float(np.sum(solver.svals[t:] ** 2))
            for solver, t in zip(solvers, values)
        )

    candidates = None
    source = "named"
    if component is not None:
        if component.field != "real":
            raise ComponentError("fit_equivariant needs a real-admissible rank vector")
        rvec = make_rank_vector(bc.spectrum, "real", component.values)
        if rvec.total_rank != r:
            raise ComponentError(f"component has total rank {rvec.total_rank}, expected {r}")
        best_values = rvec.values
    elif heuristic == "energy":
        best_values = _energy_component(blocks, solvers, r)
        source = "heuristic"
    elif heuristic is not None:
        raise ComponentError(f"unknown heuristic {heuristic!r}")
    else:
        total = count_components(bc.spectrum, r, "real")
        if total == 0:
            raise ComponentError(f"no admissible component of total rank {r}")
        if total > search_limit:
            raise SearchLimitError(
                f"{total} components exceed search limit {search_limit}; name a component or use the heuristic"
            )
        scored = [
            (desc.rank_vector.values, component_loss(desc.rank_vector.values))
            for desc in enumerate_components(bc.spectrum, r, "real", limit=None)
        ]
        best_values = min(scored, key=lambda t: (t[1], t[0]))[0]
        candidates = tuple(scored)
        source = "search"

    B = np.zeros((n, n))
    per_block = []
    for (blk, sl, solver, t) in zip(bc.spectrum.real_blocks, bc.block_slices, solvers, best_values):
        B[sl, sl] = solver.build(t)
        per_block.append(
            _block_fit((blk.kind, blk.l, blk.m), t, solver.svals, tie_tol, solver.base_loss)
        )
    minimizer = bc.matrix @ B @ bc.inverse
    loss = float(np.linalg.norm(minimizer @ x - y) ** 2)
    rvec = make_rank_vector(bc.spectrum, "real", best_values)
    return FitResult(
        minimizer, loss, rvec, tuple(per_block), ridge, candidates, constant, source
    )


def ed_degrees(kind: str, dims: Sequence[int]) -> int:
    """Closed-form squared-error / Euclidean-distance degrees.

    determinantal(m, n, r) -> binom(min(m, n), r);
    invariant(m, k, r)     -> binom(min(m, k), min(r, k));
    realization_block(d, r) -> binom(d, r).
    """
    if kind == "determinantal":
        m, n, r = dims
        return math.comb(min(m, n), r)
    if kind == "invariant":
        m, k, r = dims
        return math.comb(min(m, k), min(r, k))
    if kind == "realization_block":
        d, r = dims
        return math.comb(d, r)
    raise SizeMismatchError(f"unknown degree kind {kind!r}")
