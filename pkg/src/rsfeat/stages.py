"""Per-pixel processing stages.

Each stage pads its input, allocates a fresh output and hands a span kernel
to :func:`rsfeat.backends.for_each_output_pixel`.  The kernels are compiled
with ``nogil=True`` so worker threads execute them in parallel.  Intermediate
LoG responses are plain ``float64`` arrays.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np
from numba import njit

from .backends import SEQUENTIAL, WorkPartition, for_each_output_pixel
from .kernels import LoGKernel
from .raster import BinaryMask, BorderPolicy, RasterImage, pad_array


@dataclass(frozen=True)
class ZeroCrossingParams:
    threshold: float = 0.0

    def __post_init__(self):
        if not self.threshold >= 0:
            raise ValueError(f"zero-crossing threshold must be >= 0, got {self.threshold}")


@dataclass(frozen=True)
class StdDevParams:
    max_dev_5x5: float
    accept_dev_3x3: float

    def __post_init__(self):
        if not (self.max_dev_5x5 > 0 and self.accept_dev_3x3 > 0):
            raise ValueError("standard-deviation thresholds must be > 0")


@dataclass(frozen=True)
class HybridMedianParams:
    window: int = 5
    passes: tuple[int, ...] = field(default=())

    def __post_init__(self):
        object.__setattr__(self, "passes", tuple(int(p) for p in self.passes))
        for w in (self.window, *self.passes):
            if w < 3 or w % 2 == 0:
                raise ValueError(f"hybrid median window must be odd and >= 3, got {w}")

    @property
    def schedule(self) -> tuple[int, ...]:
        return self.passes or (self.window,)


# -- compiled span kernels ---------------------------------------------------

@njit(nogil=True, cache=True)
def _convolve_spans(padded, coeffs, out, spans):
    width = out.shape[1]
    k = coeffs.shape[0]
    for s in range(spans.shape[0]):
        for gid in range(spans[s, 0], spans[s, 1]):
            row = gid // width
            col = gid % width
            acc = 0.0
            for i in range(k):
                for j in range(k):
                    acc += coeffs[i, j] * padded[row + i, col + j]
            out[row, col] = acc


@njit(nogil=True, cache=True)
def _zero_cross_spans(padded, threshold, out, spans):
    width = out.shape[1]
    for s in range(spans.shape[0]):
        for gid in range(spans[s, 0], spans[s, 1]):
            row = gid // width
            col = gid % width
            v = padded[row + 1, col + 1]
            positive = v >= 0.0
            av = abs(v)
            found = False
            smallest = True
            gap = 0.0
            for d in range(4):
                if d == 0:
                    n = padded[row, col + 1]
                elif d == 1:
                    n = padded[row + 2, col + 1]
                elif d == 2:
                    n = padded[row + 1, col]
                else:
                    n = padded[row + 1, col + 2]
                if (n >= 0.0) != positive:
                    found = True
                    an = abs(n)
                    if av > an:
                        smallest = False
                    if av + an > gap:
                        gap = av + an
            out[row, col] = found and smallest and gap >= threshold


@njit(nogil=True, cache=True)
def _window_std(a, r0, c0, size):
    n = size * size
    total = 0.0
    for i in range(size):
        for j in range(size):
            total += a[r0 + i, c0 + j]
    mean = total / n
    ss = 0.0
    for i in range(size):
        for j in range(size):
            d = a[r0 + i, c0 + j] - mean
            ss += d * d
    return math.sqrt(ss / (n - 1))


@njit(nogil=True, cache=True)
def _stddev_spans(padded, candidates, max5, accept3, out, spans):
    width = out.shape[1]
    for s in range(spans.shape[0]):
        for gid in range(spans[s, 0], spans[s, 1]):
            row = gid // width
            col = gid % width
            hit = False
            if candidates[row, col]:
                if _window_std(padded, row, col, 5) > max5:
                    hit = _window_std(padded, row + 1, col + 1, 3) > accept3
            out[row, col] = hit


@njit(nogil=True, cache=True)
def _insertion_median(buf, n):
    for i in range(1, n):
        x = buf[i]
        j = i - 1
        while j >= 0 and buf[j] > x:
            buf[j + 1] = buf[j]
            j -= 1
        buf[j + 1] = x
    return buf[n // 2]


@njit(nogil=True, cache=True)
def _hybrid_median_spans(padded, window, out, spans):
    width = out.shape[1]
    r = window // 2
    m = 2 * window - 1
    plus = np.empty(m, dtype=np.float64)
    cross = np.empty(m, dtype=np.float64)
    trio = np.empty(3, dtype=np.float64)
    for s in range(spans.shape[0]):
        for gid in range(spans[s, 0], spans[s, 1]):
            row = gid // width
            col = gid % width
            k = 0
            for i in range(window):
                plus[k] = padded[row + r, col + i]
                cross[k] = padded[row + i, col + i]
                k += 1
            for i in range(window):
                if i != r:
                    plus[k] = padded[row + i, col + r]
                    cross[k] = padded[row + i, col + window - 1 - i]
                    k += 1
            trio[0] = _insertion_median(plus, m)
            trio[1] = _insertion_median(cross, m)
            trio[2] = padded[row + r, col + r]
            out[row, col] = _insertion_median(trio, 3)


# -- public stages -------------------------------------------------------------

def _as_real(image) -> np.ndarray:
    arr = image.pixels if isinstance(image, RasterImage) else image
    arr = np.asarray(arr, dtype=np.float64)
    if arr.ndim != 2:
        raise ValueError(f"expected a 2-D image, got shape {arr.shape}")
    return arr


def _border(border: BorderPolicy | None, margin: int, stage: str) -> BorderPolicy:
    if border is None:
        return BorderPolicy("replicate", margin)
    if border.margin != margin:
        raise ValueError(f"{stage} needs a border margin of {margin}, got {border.margin}")
    return border


def sample_stddev(values) -> float:
    """Unbiased (n - 1) standard deviation of a square window, two-pass."""
    a = np.ascontiguousarray(values, dtype=np.float64)
    if a.ndim != 2 or a.shape[0] != a.shape[1] or a.shape[0] < 2:
        raise ValueError("expected a square window of side >= 2")
    return _window_std(a, 0, 0, a.shape[0])


def convolve(image, kernel: LoGKernel, border: BorderPolicy | None = None,
             partition: WorkPartition = SEQUENTIAL) -> np.ndarray:
    """Windowed weighted sum of ``kernel`` over the padded image.

    The output has the input's dimensions.  ``border.margin`` must equal the
    kernel radius.
    """
    src = _as_real(image)
    border = _border(border, kernel.radius, "convolve")
    padded = np.ascontiguousarray(pad_array(src, border))
    coeffs = np.ascontiguousarray(kernel.coeffs, dtype=np.float64)
    out = np.empty_like(src)
    for_each_output_pixel(src.shape, partition,
                          lambda spans: _convolve_spans(padded, coeffs, out, spans))
    return out


def zero_crossings(response, params: ZeroCrossingParams = ZeroCrossingParams(),
                   border: BorderPolicy | None = None,
                   partition: WorkPartition = SEQUENTIAL) -> BinaryMask:
    """Mark sign changes against the 4-neighbours.

    A pixel is marked when some up/down/left/right neighbour has the opposite
    sign, the pixel's magnitude does not exceed that of any opposite-sign
    neighbour, and the largest ``|p| + |n|`` over those neighbours reaches
    ``params.threshold``.  Exact zeros count as positive.
    """
    src = _as_real(response)
    border = _border(border, 1, "zero_crossings")
    padded = np.ascontiguousarray(pad_array(src, border))
    out = np.empty(src.shape, dtype=np.bool_)
    thr = float(params.threshold)
    for_each_output_pixel(src.shape, partition,
                          lambda spans: _zero_cross_spans(padded, thr, out, spans))
    return BinaryMask(out)


def stddev_classify(source, candidates: BinaryMask, params: StdDevParams,
                    border: BorderPolicy | None = None,
                    partition: WorkPartition = SEQUENTIAL) -> BinaryMask:
    """Keep candidate pixels whose neighbourhood deviation is high.

    A candidate's 5x5 sample deviation is computed first; when it exceeds
    ``max_dev_5x5`` the 3x3 deviation decides, against ``accept_dev_3x3``.
    Pixels outside ``candidates`` are never marked.
    """
    src = _as_real(source)
    if candidates.shape != src.shape:
        raise ValueError(f"candidate mask {candidates.shape} does not match source {src.shape}")
    border = _border(border, 2, "stddev_classify")
    padded = np.ascontiguousarray(pad_array(src, border))
    cand = np.ascontiguousarray(candidates.bits)
    out = np.empty(src.shape, dtype=np.bool_)
    max5, acc3 = float(params.max_dev_5x5), float(params.accept_dev_3x3)
    for_each_output_pixel(
        src.shape, partition,
        lambda spans: _stddev_spans(padded, cand, max5, acc3, out, spans))
    return BinaryMask(out)


def combine_masks(features: BinaryMask, edges: BinaryMask) -> BinaryMask:
    if features.shape != edges.shape:
        raise ValueError(f"mask dimensions differ: {features.shape} vs {edges.shape}")
    return BinaryMask(features.bits | edges.bits)


def hybrid_median(image: RasterImage, params: HybridMedianParams = HybridMedianParams(),
                  border: BorderPolicy | None = None,
                  partition: WorkPartition = SEQUENTIAL) -> RasterImage:
    """Apply the hybrid median once per window in ``params.schedule``.

    For each pixel the result is the median of three values: the median of
    the ``+``-shaped subgroup (row and column through the centre), the median
    of the ``x``-shaped subgroup (both diagonals) and the centre itself.
    Only the mode of ``border`` is used; the margin follows each pass's window.
    """
    mode = border.mode if border is not None else "replicate"
    cur = _as_real(image)
    for window in params.schedule:
        padded = np.ascontiguousarray(pad_array(cur, BorderPolicy(mode, window // 2)))
        out = np.empty_like(cur)
        for_each_output_pixel(
            cur.shape, partition,
            lambda spans, padded=padded, out=out, window=window:
                _hybrid_median_spans(padded, window, out, spans))
        cur = out
    # every output value is one of the input values, so the cast is exact
    return RasterImage(cur, image.bit_depth)
