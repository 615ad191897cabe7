"""Independent brute-force verifiers, intentionally slow and simple.

These deliberately avoid the fast paths they cross-check: commutant dimension
comes from a dense nullspace of the stacked commutation system, component
counts from plain recursive enumeration, and fit losses from alternating
least squares restarts.  Hard size caps keep the full suite fast.
"""

from __future__ import annotations

from typing import Optional, Sequence

import numpy as np

from .errors import SizeCapError, SizeMismatchError
from .perms import Permutation, permutation_matrix
from .spectral import BlockSpectrum

__all__ = ["nullspace_commutant_dim", "recursive_component_count", "als_low_rank"]

MAX_NULLSPACE_N = 16
MAX_COUNT_BLOCKS = 8
MAX_COUNT_BOUND = 30
MAX_ALS_DIM = 12


def nullspace_commutant_dim(gens: Sequence[Permutation]) -> int:
    """dim {M : M P_g = P_g M for all g} via the nullspace of the n^2 system."""
    if not gens:
        raise SizeMismatchError("need at least one generator")
    n = gens[0].n
    if n > MAX_NULLSPACE_N:
        raise SizeCapError(f"nullspace oracle capped at n <= {MAX_NULLSPACE_N}, got {n}")
    eye = np.eye(n)
    rows = []
    for g in gens:
        P = permutation_matrix(g).astype(float)
        # row-major vec: vec(M P) = kron(I, P^T) vec(M), vec(P M) = kron(P, I) vec(M)
        rows.append(np.kron(eye, P.T) - np.kron(P, eye))
    system = np.vstack(rows)
    return n * n - np.linalg.matrix_rank(system, tol=1e-9)


def recursive_component_count(spec: BlockSpectrum, r: int, field: str) -> int:
    """Plain recursive enumeration of admissible rank vectors (no DP table)."""
    if field == "complex":
        blocks = [(b.size, 1) for b in spec.complex_blocks]
    elif field == "real":
        blocks = [(b.size, b.rank_multiplier) for b in spec.real_blocks]
    else:
        raise SizeMismatchError(f"unknown field {field!r}")
    if len(blocks) > MAX_COUNT_BLOCKS:
        raise SizeCapError(f"counting oracle capped at {MAX_COUNT_BLOCKS} blocks, got {len(blocks)}")
    if any(d > MAX_COUNT_BOUND for d, _ in blocks):
        raise SizeCapError(f"counting oracle capped at bounds <= {MAX_COUNT_BOUND}")

    def rec(i: int, remaining: int) -> int:
        if i == len(blocks):
            return 1 if remaining == 0 else 0
        d, mult = blocks[i]
        return sum(rec(i + 1, remaining - t * mult) for t in range(min(d, remaining // mult) + 1))

    return rec(0, r) if r >= 0 else 0


def als_low_rank(
    r: int,
    restarts: int = 100,
    u: Optional[np.ndarray] = None,
    x: Optional[np.ndarray] = None,
    y: Optional[np.ndarray] = None,
    sweeps: int = 60,
    seed: int = 0,
) -> float:
    """Best loss over alternating-least-squares restarts on the factored problem.

    Either pass `u` (minimizes ||A B - u||_F^2) or `x` and `y` (minimizes
    ||A B x - y||_F^2).  An upper-bound certificate only.
    """
    if u is not None:
        x_, y_ = np.eye(np.asarray(u).shape[1]), np.asarray(u, dtype=float)
    elif x is not None and y is not None:
        x_, y_ = np.asarray(x, dtype=float), np.asarray(y, dtype=float)
    else:
        raise SizeMismatchError("pass either u or both x and y")
    m, n = y_.shape[0], x_.shape[0]
    if max(m, n, x_.shape[1]) > MAX_ALS_DIM:
        raise SizeCapError(f"ALS oracle capped at dimensions <= {MAX_ALS_DIM}")
    if r == 0:
        return float(np.linalg.norm(y_) ** 2)
    rng = np.random.default_rng(seed)
    xp = np.linalg.pinv(x_)
    best = np.inf
    for _ in range(restarts):
        A = rng.standard_normal((m, r))
        for _ in range(sweeps):
            B = np.linalg.pinv(A) @ y_ @ xp
            bx = B @ x_
            A = y_ @ np.linalg.pinv(bx)
        loss = float(np.linalg.norm(A @ bx - y_) ** 2)
        best = min(best, loss)
    return best
