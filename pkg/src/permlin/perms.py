"""Permutations on [n] = {1, ..., n}, their cycle structure, and induced partitions.

Labels are 1-based everywhere in the public interface.  A permutation sigma is
stored by its image tuple, image[j-1] = sigma(j).  Its matrix P has row j equal
to the transpose of the sigma(j)-th standard unit vector, so (P x)_j = x_{sigma(j)}
and P is orthogonal.

Cycle notation accepts strings like "(1 4 3 2)(5 8 7 6)"; labels not mentioned
are fixed points.  One-line image notation is a comma-separated list such as
"3,5,4,1,2".
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from typing import Iterable, Sequence

import numpy as np

from .errors import PermParseError, SizeMismatchError

__all__ = [
    "Permutation",
    "CycleDecomposition",
    "Partition",
    "parse_permutation",
    "cycle_decomposition",
    "induced_partition",
    "permutation_matrix",
    "finest_common_coarsening",
    "replication_matrix",
    "refines",
]


@dataclass(frozen=True)
class Permutation:
    """A bijection of {1, ..., n} given by its image tuple."""

    n: int
    image: tuple[int, ...]

    def __post_init__(self):
        if self.n <= 0:
            raise PermParseError(f"ground-set size must be positive, got {self.n}")
        if len(self.image) != self.n or sorted(self.image) != list(range(1, self.n + 1)):
            raise PermParseError(f"image {self.image} is not a bijection of [{self.n}]")

    def __call__(self, j: int) -> int:
        return self.image[j - 1]

    def inverse(self) -> "Permutation":
        inv = [0] * self.n
        for j, s in enumerate(self.image, start=1):
            inv[s - 1] = j
        return Permutation(self.n, tuple(inv))

    def power(self, t: int) -> "Permutation":
        base = self if t >= 0 else self.inverse()
        img = list(range(1, self.n + 1))
        for _ in range(abs(t)):
            img = [base(j) for j in img]
        return Permutation(self.n, tuple(img))

    def order(self) -> int:
        return int(np.lcm.reduce([len(c) for c in cycle_decomposition(self).cycles]))

    def apply(self, x: np.ndarray) -> np.ndarray:
        """Matrix-free application of P_sigma: (P x)_j = x_{sigma(j)}."""
        idx = np.asarray(self.image) - 1
        return np.asarray(x)[idx]

    @staticmethod
    def identity(n: int) -> "Permutation":
        return Permutation(n, tuple(range(1, n + 1)))


@dataclass(frozen=True)
class CycleDecomposition:
    """Disjoint cycles covering [n], trivial 1-cycles included.

    Cycles are ordered by their smallest label; each cycle starts at its
    smallest label and follows sigma.
    """

    n: int
    cycles: tuple[tuple[int, ...], ...]

    @property
    def lengths(self) -> tuple[int, ...]:
        return tuple(len(c) for c in self.cycles)

    @property
    def k(self) -> int:
        return len(self.cycles)


@dataclass(frozen=True)
class Partition:
    """A partition of [n] in canonical order.

    Blocks are sorted by smallest element, elements ascending within a block.
    """

    n: int
    blocks: tuple[tuple[int, ...], ...]

    def __post_init__(self):
        seen = sorted(x for b in self.blocks for x in b)
        if seen != list(range(1, self.n + 1)):
            raise SizeMismatchError(f"blocks do not partition [{self.n}]")

    @property
    def k(self) -> int:
        return len(self.blocks)

    @staticmethod
    def from_blocks(n: int, blocks: Iterable[Iterable[int]]) -> "Partition":
        canon = tuple(sorted((tuple(sorted(b)) for b in blocks), key=lambda b: b[0]))
        return Partition(n, canon)

    def block_of(self) -> dict[int, int]:
        """Map label -> 0-based block index."""
        return {x: i for i, b in enumerate(self.blocks) for x in b}


_CYCLE_RE = re.compile(r"\(([^()]*)\)")


def parse_permutation(text: str, n: int) -> Permutation:
    """Parse cycle notation or a one-line image into a permutation of [n].

    Empty cycle text means the identity.  Raises PermParseError naming the
    offending token on duplicates, out-of-range labels, or bad parentheses.
    """
    stripped = text.strip()
    if "(" in stripped or stripped == "":
        body = stripped
        cycles = []
        pos = 0
        for m in _CYCLE_RE.finditer(body):
            if body[pos:m.start()].strip():
                raise PermParseError(f"unexpected text {body[pos:m.start()].strip()!r} between cycles")
            labels = [tok for tok in re.split(r"[\s,]+", m.group(1).strip()) if tok]
            if len(labels) < 2:
                raise PermParseError(f"cycle ({m.group(1).strip()}) needs at least two labels")
            cycles.append([_parse_label(tok, n) for tok in labels])
            pos = m.end()
        if body[pos:].strip():
            raise PermParseError(f"malformed parentheses near {body[pos:].strip()!r}")
        image = list(range(1, n + 1))
        used: set[int] = set()
        for cyc in cycles:
            for a in cyc:
                if a in used:
                    raise PermParseError(f"duplicate label {a}")
                used.add(a)
            for a, b in zip(cyc, cyc[1:] + cyc[:1]):
                image[a - 1] = b
        return Permutation(n, tuple(image))
    labels = [_parse_label(tok, n) for tok in re.split(r"[\s,]+", stripped) if tok]
    if len(labels) != n:
        raise PermParseError(f"one-line image has {len(labels)} entries, expected {n}")
    if len(set(labels)) != n:
        dup = next(x for x in labels if labels.count(x) > 1)
        raise PermParseError(f"duplicate label {dup}")
    return Permutation(n, tuple(labels))


def _parse_label(tok: str, n: int) -> int:
    try:
        v = int(tok)
    except ValueError:
        raise PermParseError(f"not an integer label: {tok!r}") from None
    if not 1 <= v <= n:
        raise PermParseError(f"label {v} out of range 1..{n}")
    return v


def cycle_decomposition(p: Permutation) -> CycleDecomposition:
    seen = [False] * p.n
    cycles = []
    for a in range(1, p.n + 1):
        if seen[a - 1]:
            continue
        cyc = [a]
        seen[a - 1] = True
        b = p(a)
        while b != a:
            cyc.append(b)
            seen[b - 1] = True
            b = p(b)
        cycles.append(tuple(cyc))
    return CycleDecomposition(p.n, tuple(cycles))


def induced_partition(c: CycleDecomposition) -> Partition:
    return Partition.from_blocks(c.n, c.cycles)


def permutation_matrix(p: Permutation) -> np.ndarray:
    """Dense integer P_sigma with row j = transpose of the sigma(j)-th unit vector."""
    P = np.zeros((p.n, p.n), dtype=np.int64)
    for j, s in enumerate(p.image):
        P[j, s - 1] = 1
    return P


def finest_common_coarsening(parts: Sequence[Partition]) -> Partition:
    """Finest partition coarsening every input, by union-find chaining."""
    if not parts:
        raise SizeMismatchError("need at least one partition")
    n = parts[0].n
    if any(q.n != n for q in parts):
        raise SizeMismatchError("partitions are over different ground sets")
    parent = list(range(n + 1))

    def find(x):
        while parent[x] != x:
            parent[x] = parent[parent[x]]
            x = parent[x]
        return x

    for q in parts:
        for block in q.blocks:
            root = find(block[0])
            for x in block[1:]:
                rx = find(x)
                if rx != root:
                    parent[rx] = root
    groups: dict[int, list[int]] = {}
    for x in range(1, n + 1):
        groups.setdefault(find(x), []).append(x)
    return Partition.from_blocks(n, groups.values())


def replication_matrix(part: Partition) -> np.ndarray:
    """The k x n matrix E with column j = e_i whenever j lies in block i."""
    E = np.zeros((part.k, part.n), dtype=np.int64)
    for i, block in enumerate(part.blocks):
        for j in block:
            E[i, j - 1] = 1
    return E


def refines(fine: Partition, coarse: Partition) -> bool:
    """True iff every block of `fine` is contained in a block of `coarse`."""
    if fine.n != coarse.n:
        raise SizeMismatchError("partitions are over different ground sets")
    owner = coarse.block_of()
    return all(len({owner[x] for x in b}) == 1 for b in fine.blocks)
