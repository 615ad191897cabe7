"""Synthetic shift-equivariant image data for the end-to-end demo.

Images are height x width grids carrying a few random axis-aligned bars,
cyclically shifted in the horizontal direction, plus a little noise so the
sample Gram matrix has full rank.  Vectorization is row-major, so the
one-step horizontal shift acts by a permutation whose cycles are the rows.
"""

from __future__ import annotations

import numpy as np

from .perms import Permutation

__all__ = ["horizontal_shift_permutation", "demo_shift_dataset"]


def horizontal_shift_permutation(height: int, width: int) -> Permutation:
    """The one-pixel cyclic horizontal shift on row-major height x width images."""
    image = []
    for i in range(height):
        for j in range(width):
            image.append(i * width + (j + 1) % width + 1)
    return Permutation(height * width, tuple(image))


def demo_shift_dataset(
    height: int = 32,
    width: int = 32,
    samples: int = 2000,
    seed: int = 0,
    noise: float = 0.05,
    max_bars: int = 3,
) -> np.ndarray:
    """n x d data matrix of randomly shifted bar images, n = height * width."""
    rng = np.random.default_rng(seed)
    n = height * width
    X = np.empty((n, samples))
    for s in range(samples):
        img = np.zeros((height, width))
        for _ in range(rng.integers(1, max_bars + 1)):
            if rng.random() < 0.5:
                img[rng.integers(height), :] += rng.uniform(0.5, 1.5)
            else:
                img[:, rng.integers(width)] += rng.uniform(0.5, 1.5)
        img = np.roll(img, rng.integers(width), axis=1)
        img += noise * rng.standard_normal((height, width))
        X[:, s] = img.ravel()
    return X
