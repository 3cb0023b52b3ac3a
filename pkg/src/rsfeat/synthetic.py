"""Synthetic test rasters: flat fields, step edges, blocks, impulses and thin lines."""

from __future__ import annotations

import numpy as np

from .raster import RasterImage

KINDS = ("flat", "step", "block", "impulses", "lines", "scene")


def block_bounds(size: int, block: int | None = None) -> tuple[int, int]:
    """``[lo, hi)`` row/column range of the centred square used by ``kind='block'``."""
    block = block or max(1, size // 8)
    lo = (size - block) // 2
    return lo, lo + block


def make_test_image(kind: str, size: int = 64, bit_depth: int = 8, seed: int = 0,
                    low: int | None = None, high: int | None = None) -> RasterImage:
    """Build a ``size`` x ``size`` fixture.

    ``low``/``high`` default to 15% and 80% of full scale.  ``scene`` mixes
    blocks, lines and impulses over a smooth gradient and mild Gaussian noise,
    for throughput runs.
    """
    if kind not in KINDS:
        raise ValueError(f"unknown fixture kind {kind!r}; choose from {', '.join(KINDS)}")
    if size < 1:
        raise ValueError("size must be >= 1")
    full = (1 << bit_depth) - 1
    low = int(0.15 * full) if low is None else low
    high = int(0.8 * full) if high is None else high
    img = np.full((size, size), low, dtype=np.int64)
    rng = np.random.default_rng(seed)

    if kind == "flat":
        pass
    elif kind == "step":
        img[:, size // 2:] = high
    elif kind == "block":
        lo, hi = block_bounds(size)
        img[lo:hi, lo:hi] = high
    elif kind == "impulses":
        n = max(1, size * size // 100)
        idx = rng.choice(size * size, size=n, replace=False)
        img.flat[idx] = rng.choice([0, full], size=n)
    elif kind == "lines":
        img[size // 3, :] = high
        img[:, (2 * size) // 3] = high
    else:
        yy, xx = np.mgrid[0:size, 0:size]
        base = low + (high - low) * 0.25 * (xx + yy) / max(1, 2 * size - 2)
        img = base + rng.normal(0.0, 0.01 * full, size=(size, size))
        for _ in range(max(1, size // 32)):
            h, w = rng.integers(4, max(5, size // 10), size=2)
            r, c = rng.integers(0, size - min(size, h) + 1), rng.integers(0, size - min(size, w) + 1)
            img[r:r + h, c:c + w] = rng.uniform(low, high)
        for _ in range(max(1, size // 64)):
            img[rng.integers(0, size), :] = high
        n = max(1, size * size // 500)
        img.flat[rng.choice(size * size, size=n, replace=False)] = rng.choice([0, full], size=n)
        img = np.clip(np.rint(img), 0, full)
    return RasterImage(img, bit_depth)
