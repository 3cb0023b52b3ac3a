"""Laplacian-of-Gaussian stencil synthesis."""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np


@dataclass(frozen=True, eq=False)
class LoGKernel:
    """Square LoG stencil; ``coeffs[r + y, r + x]`` holds the weight at offset (x, y)."""

    sigma: float
    size: int
    coeffs: np.ndarray
    dc_corrected: bool

    @property
    def radius(self) -> int:
        return (self.size - 1) // 2

    def __eq__(self, other):
        if not isinstance(other, LoGKernel):
            return NotImplemented
        return (self.sigma == other.sigma and self.size == other.size
                and self.dc_corrected == other.dc_corrected
                and np.array_equal(self.coeffs, other.coeffs))

    def format_grid(self, digits: int = 9) -> str:
        """One row per line, ``digits`` significant digits per entry."""
        return "\n".join(" ".join(f"{v:.{digits}g}" for v in row) for row in self.coeffs)


def log_value(x: float, y: float, sigma: float) -> float:
    """Continuous LoG at offset (x, y)."""
    q = (x * x + y * y) / (2.0 * sigma * sigma)
    return -(1.0 / (math.pi * sigma ** 4)) * (1.0 - q) * math.exp(-q)


def make_log_kernel(sigma: float, size: int = 5, dc_correct: bool = True) -> LoGKernel:
    """Sample the LoG at integer offsets inside a ``size`` x ``size`` window.

    With ``dc_correct`` the mean coefficient is subtracted so the stencil sums
    to zero and a flat image gives no response.
    """
    if not sigma > 0 or not math.isfinite(sigma):
        raise ValueError(f"sigma must be positive, got {sigma}")
    if int(size) != size or size < 3 or size % 2 == 0:
        raise ValueError(f"size must be an odd integer >= 3, got {size}")
    size = int(size)
    r = (size - 1) // 2
    off = np.arange(-r, r + 1, dtype=np.float64)
    yy, xx = np.meshgrid(off, off, indexing="ij")
    q = (xx * xx + yy * yy) / (2.0 * sigma * sigma)
    coeffs = -(1.0 / (math.pi * sigma ** 4)) * (1.0 - q) * np.exp(-q)
    if dc_correct:
        coeffs = coeffs - coeffs.mean()
    coeffs.flags.writeable = False
    return LoGKernel(float(sigma), size, coeffs, bool(dc_correct))


def branch_sigma(log_parameter: float, interpret_as_variance: bool = False) -> float:
    return math.sqrt(log_parameter) if interpret_as_variance else float(log_parameter)


def default_kernels(config) -> tuple[LoGKernel, LoGKernel]:
    """Return the (feature-branch, edge-branch) kernels for a pipeline config."""
    sig_low = branch_sigma(config.log_low, config.interpret_as_variance)
    sig_high = branch_sigma(config.log_high, config.interpret_as_variance)
    return (make_log_kernel(sig_low, config.kernel_size, config.dc_correct),
            make_log_kernel(sig_high, config.kernel_size, config.dc_correct))
