"""Eigenvalue bookkeeping and base changes for permutation matrices.

For a permutation with cycle lengths l_1, ..., l_k, the eigenvalues of P are
roots of unity; d_l counts the cycles whose length l divides, and equals the
multiplicity of every primitive l-th root of unity e^{2 pi i m / l} with
gcd(m, l) = 1.

Two base changes are provided:

* the complex one, T = T1 T2 T3: a cycle-sorting permutation T1 (after which P
  is block diagonal with circulant blocks having ones on the subdiagonal and
  in the top-right corner), a blockwise Vandermonde T2 that diagonalizes the
  circulants, and an eigenvalue-grouping permutation T3.  The result groups
  equal eigenvalues, one diagonal group of size d_l per pair (l, m).

* the real, orthogonal one Q: per cycle, the orthonormal vectors

      w_0   = v_0 / sqrt(l),
      w_j   = (v_j + v_{-j}) / sqrt(2 l),
      w_{-j} = (v_j - v_{-j}) / (sqrt(2 l) i),

  built from the root-of-unity eigenvectors v_j, turn each circulant into
  diag(1, [-1,] R(zeta^1), R(zeta^2), ...) with 2x2 rotation-scaling blocks;
  a final grouping permutation collects +1 coordinates, then -1 coordinates,
  then the rotation pairs per eigenvalue pair.  Conjugating P by Q yields

      Id_{d_1}  (+)  -Id_{d_2}  (+)  realize(zeta_l^{l-m} Id_{d_l})  per pair,

  with pairs labeled by the representative m satisfying 1/2 < m/l < 1.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
import scipy.linalg

from .errors import SizeMismatchError
from .linalg import realize
from .perms import CycleDecomposition, Permutation, cycle_decomposition

__all__ = [
    "ComplexBlock",
    "RealBlock",
    "BlockSpectrum",
    "BaseChange",
    "euler_phi",
    "eigen_multiplicities",
    "commutant_dimension",
    "complex_base_change",
    "real_base_change",
]


def euler_phi(l: int) -> int:
    return sum(1 for m in range(1, l + 1) if math.gcd(m, l) == 1)


@dataclass(frozen=True)
class ComplexBlock:
    """One eigenvalue group e^{2 pi i m / l}, gcd(m, l) = 1, of multiplicity size = d_l."""

    l: int
    m: int
    size: int


@dataclass(frozen=True)
class RealBlock:
    """One block of the real form: kind in {real_plus, real_minus, complex_pair}.

    `size` is d_l; a complex_pair block spans 2 * size rows and contributes
    2 * r to the total rank per unit of block rank r.
    """

    kind: str
    l: int
    m: int
    size: int

    @property
    def rows(self) -> int:
        return 2 * self.size if self.kind == "complex_pair" else self.size

    @property
    def rank_multiplier(self) -> int:
        return 2 if self.kind == "complex_pair" else 1


@dataclass(frozen=True)
class BlockSpectrum:
    n: int
    k: int
    cycle_lengths: tuple[int, ...]
    multiplicities: dict[int, int]
    complex_blocks: tuple[ComplexBlock, ...]
    real_blocks: tuple[RealBlock, ...]

    @staticmethod
    def from_cycle_lengths(lengths) -> "BlockSpectrum":
        lengths = tuple(int(x) for x in lengths)
        n = sum(lengths)
        ls = sorted({l for L in lengths for l in range(1, L + 1) if L % l == 0})
        d = {l: sum(1 for L in lengths if L % l == 0) for l in ls}
        cplx = []
        for l in ls:
            for m in range(1, l + 1):
                if math.gcd(m, l) == 1:
                    cplx.append(ComplexBlock(l, m, d[l]))
        real = [RealBlock("real_plus", 1, 1, d[1])]
        if 2 in d:
            real.append(RealBlock("real_minus", 2, 1, d[2]))
        for l in ls:
            if l >= 3:
                for m in range(l // 2 + 1, l):
                    if math.gcd(m, l) == 1:
                        real.append(RealBlock("complex_pair", l, m, d[l]))
        return BlockSpectrum(n, len(lengths), lengths, d, tuple(cplx), tuple(real))

    def complex_offsets(self) -> list[int]:
        offs, pos = [], 0
        for b in self.complex_blocks:
            offs.append(pos)
            pos += b.size
        return offs

    def real_offsets(self) -> list[int]:
        offs, pos = [], 0
        for b in self.real_blocks:
            offs.append(pos)
            pos += b.rows
        return offs


def eigen_multiplicities(c: CycleDecomposition) -> BlockSpectrum:
    return BlockSpectrum.from_cycle_lengths(c.lengths)


def commutant_dimension(c: CycleDecomposition) -> int:
    """dim of {M : M P = P M} = sum over l of phi(l) * d_l^2; same over R and C."""
    spec = eigen_multiplicities(c)
    return sum(euler_phi(l) * d * d for l, d in spec.multiplicities.items())


@dataclass(frozen=True)
class BaseChange:
    """An invertible base change together with its block layout.

    `matrix` @ `inverse` is the identity; for field "real" the matrix is
    orthogonal and inverse is its transpose.  `block_slices` maps each block
    of the layout (in canonical order) to its row/column range; `grouping` is
    the final block-collecting permutation (step 3), kept for debuggability.
    """

    field: str
    matrix: np.ndarray
    inverse: np.ndarray
    spectrum: BlockSpectrum
    block_slices: tuple[slice, ...]
    grouping: tuple[int, ...]

    def conjugate(self, m: np.ndarray) -> np.ndarray:
        """inverse @ m @ matrix."""
        return self.inverse @ np.asarray(m, dtype=self.matrix.dtype) @ self.matrix

    def unconjugate(self, b: np.ndarray) -> np.ndarray:
        return self.matrix @ np.asarray(b, dtype=self.matrix.dtype) @ self.inverse

    def expected_block_form(self) -> np.ndarray:
        """The documented conjugated form of P under this base change."""
        if self.field == "complex":
            diag = np.concatenate(
                [np.full(b.size, np.exp(2j * np.pi * b.m / b.l)) for b in self.spectrum.complex_blocks]
            )
            return np.diag(diag)
        parts = []
        for b in self.spectrum.real_blocks:
            if b.kind == "real_plus":
                parts.append(np.eye(b.size))
            elif b.kind == "real_minus":
                parts.append(-np.eye(b.size))
            else:
                zeta = np.exp(2j * np.pi * (b.l - b.m) / b.l)
                parts.append(realize(zeta * np.eye(b.size, dtype=complex)))
        return scipy.linalg.block_diag(*parts)


def _cycle_sort_order(p: Permutation) -> list[int]:
    """0-based label order: cycles by smallest label, each followed along sigma^{-1}.

    This ordering turns every diagonal block of the sorted P into the
    circulant with ones on the subdiagonal and in the top-right corner.
    """
    inv = p.inverse()
    order = []
    for cyc in cycle_decomposition(p).cycles:
        cur = cyc[0]
        for _ in range(len(cyc)):
            order.append(cur - 1)
            cur = inv(cur)
    return order


def _reduced_label(num: int, den: int) -> tuple[int, int]:
    """Reduce e^{2 pi i num/den} to its primitive label (l, m), with (1, 1) for 1."""
    num %= den
    if num == 0:
        return (1, 1)
    g = math.gcd(num, den)
    return (den // g, num // g)


def complex_base_change(p: Permutation) -> BaseChange:
    """T = T1 T2 T3 with T^{-1} P T diagonal, equal eigenvalues grouped.

    The permutation factors T1 (cycle sort) and T3 (eigenvalue grouping) are
    applied by row/column indexing rather than matrix products.
    """
    cd = cycle_decomposition(p)
    spec = eigen_multiplicities(cd)
    n = p.n
    order = np.asarray(_cycle_sort_order(p))
    unsort = np.argsort(order)

    vanders = []
    for l in cd.lengths:
        zeta = np.exp(2j * np.pi / l)
        vanders.append(zeta ** (np.outer(np.arange(l), np.arange(l))))
    T2 = scipy.linalg.block_diag(*vanders).astype(complex)
    T2_inv = scipy.linalg.block_diag(*[np.conj(v) / v.shape[0] for v in vanders]).astype(complex)

    # Position j inside a length-l cycle carries the eigenvalue zeta_l^{-j};
    # collect positions per reduced label in canonical (l asc, m asc) order.
    positions: dict[tuple[int, int], list[int]] = {}
    offset = 0
    for l in cd.lengths:
        for j in range(l):
            positions.setdefault(_reduced_label(l - j, l), []).append(offset + j)
        offset += l
    grouping = []
    slices, pos = [], 0
    for b in spec.complex_blocks:
        cols = positions[(b.l, b.m)]
        if len(cols) != b.size:
            raise SizeMismatchError(f"eigenvalue group ({b.l},{b.m}) has {len(cols)} columns, expected {b.size}")
        grouping.extend(cols)
        slices.append(slice(pos, pos + b.size))
        pos += b.size

    matrix = T2[unsort][:, grouping]
    inverse = T2_inv[grouping][:, unsort]
    return BaseChange("complex", matrix, inverse, spec, tuple(slices), tuple(grouping))


def _real_cycle_basis(l: int) -> tuple[np.ndarray, list[tuple[str, int]]]:
    """Orthogonal l x l factor for one cycle plus per-coordinate tags.

    Tags are ("plus", 0), ("minus", 0), or ("pair", j) twice for each pair
    (w_j, w_{-j}); column order is w_0, w_{l/2} when l is even, then the pairs
    for j = 1, 2, ...
    """
    zeta = np.exp(2j * np.pi / l)
    cols = [np.ones(l) / np.sqrt(l)]
    tags: list[tuple[str, int]] = [("plus", 0)]
    if l % 2 == 0:
        v = zeta ** (np.arange(l) * (l // 2))
        cols.append(v.real / np.sqrt(l))
        tags.append(("minus", 0))
    for j in range(1, (l - 1) // 2 + 1):
        v = zeta ** (np.arange(l) * j)
        cols.append(np.sqrt(2.0 / l) * v.real)
        cols.append(np.sqrt(2.0 / l) * v.imag)
        tags.extend([("pair", j), ("pair", j)])
    return np.column_stack(cols), tags


def real_base_change(p: Permutation) -> BaseChange:
    """Orthogonal Q with Q^T P Q = Id (+) -Id (+) realization blocks per pair."""
    cd = cycle_decomposition(p)
    spec = eigen_multiplicities(cd)
    n = p.n
    unsort = np.argsort(_cycle_sort_order(p))

    blocks, tag_rows = [], []
    offset = 0
    for l in cd.lengths:
        O, tags = _real_cycle_basis(l)
        blocks.append(O)
        for t, tag in enumerate(tags):
            tag_rows.append((tag, l, offset + t))
        offset += l
    Q1 = scipy.linalg.block_diag(*blocks)

    # Collect coordinates per canonical real block; a pair j in a length-l
    # cycle carries eigenvalues zeta_l^{+-j} and is labeled by the reduced
    # (l', m') of (l - j)/l, which satisfies 1/2 < m'/l' < 1.
    grouping = []
    slices, pos = [], 0
    for b in spec.real_blocks:
        cols = []
        for (kind, j), l, col in tag_rows:
            if b.kind == "real_plus" and kind == "plus":
                cols.append(col)
            elif b.kind == "real_minus" and kind == "minus":
                cols.append(col)
            elif b.kind == "complex_pair" and kind == "pair" and _reduced_label(l - j, l) == (b.l, b.m):
                cols.append(col)
        if len(cols) != b.rows:
            raise SizeMismatchError(f"block {b} collected {len(cols)} columns, expected {b.rows}")
        grouping.extend(cols)
        slices.append(slice(pos, pos + b.rows))
        pos += b.rows

    Q = Q1[unsort][:, grouping]
    return BaseChange("real", Q, Q.T.copy(), spec, tuple(slices), tuple(grouping))
