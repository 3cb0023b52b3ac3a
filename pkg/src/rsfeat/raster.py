"""Grayscale raster containers, border padding and PGM/raw file I/O."""

from __future__ import annotations

import os
import re
from dataclasses import dataclass
from typing import Literal

import numpy as np

BorderMode = Literal["replicate", "reflect", "zero"]

_NP_PAD_MODE = {"replicate": "edge", "reflect": "reflect", "zero": "constant"}
_DTYPE = {8: np.uint8, 16: np.uint16}


class RasterFormatError(ValueError):
    """Raised for malformed headers, size mismatches and unsupported sample formats."""


def _frozen(arr: np.ndarray) -> np.ndarray:
    arr = np.array(arr, copy=True, order="C")
    arr.flags.writeable = False
    return arr


@dataclass(frozen=True, eq=False)
class RasterImage:
    """Row-major, top-left origin grayscale image stored at 8 or 16 bits.

    ``pixels`` is a read-only ``(height, width)`` array of ``uint8`` or ``uint16``.
    """

    pixels: np.ndarray
    bit_depth: int = 8

    def __post_init__(self):
        if self.bit_depth not in _DTYPE:
            raise ValueError(f"bit_depth must be 8 or 16, got {self.bit_depth}")
        arr = np.asarray(self.pixels)
        if arr.ndim != 2 or arr.shape[0] < 1 or arr.shape[1] < 1:
            raise ValueError(f"pixels must be a non-empty 2-D grid, got shape {arr.shape}")
        if arr.size and (arr.min() < 0 or arr.max() > self.max_value):
            raise ValueError(f"intensities outside [0, {self.max_value}]")
        if not np.issubdtype(arr.dtype, np.integer):
            if not np.array_equal(arr, np.round(arr)):
                raise ValueError("intensities must be integral")
        object.__setattr__(self, "pixels", _frozen(arr.astype(_DTYPE[self.bit_depth])))

    @property
    def width(self) -> int:
        return self.pixels.shape[1]

    @property
    def height(self) -> int:
        return self.pixels.shape[0]

    @property
    def shape(self) -> tuple[int, int]:
        return self.pixels.shape

    @property
    def max_value(self) -> int:
        return (1 << self.bit_depth) - 1

    def __eq__(self, other):
        if not isinstance(other, RasterImage):
            return NotImplemented
        return self.bit_depth == other.bit_depth and np.array_equal(self.pixels, other.pixels)

    def __repr__(self):
        return f"RasterImage({self.width}x{self.height}, {self.bit_depth}-bit)"


@dataclass(frozen=True, eq=False)
class BinaryMask:
    """Per-pixel boolean grid with the dimensions of the image it came from."""

    bits: np.ndarray

    def __post_init__(self):
        arr = np.asarray(self.bits)
        if arr.ndim != 2:
            raise ValueError(f"mask must be 2-D, got shape {arr.shape}")
        object.__setattr__(self, "bits", _frozen(arr.astype(bool)))

    @classmethod
    def empty(cls, shape: tuple[int, int]) -> "BinaryMask":
        return cls(np.zeros(shape, dtype=bool))

    @property
    def width(self) -> int:
        return self.bits.shape[1]

    @property
    def height(self) -> int:
        return self.bits.shape[0]

    @property
    def shape(self) -> tuple[int, int]:
        return self.bits.shape

    def count(self) -> int:
        return int(self.bits.sum())

    def any(self) -> bool:
        return bool(self.bits.any())

    def __eq__(self, other):
        if not isinstance(other, BinaryMask):
            return NotImplemented
        return np.array_equal(self.bits, other.bits)

    def __repr__(self):
        return f"BinaryMask({self.width}x{self.height}, {self.count()} set)"


@dataclass(frozen=True)
class BorderPolicy:
    mode: BorderMode = "replicate"
    margin: int = 2

    def __post_init__(self):
        if self.mode not in _NP_PAD_MODE:
            raise ValueError(f"unknown border mode {self.mode!r}")
        if self.margin < 0:
            raise ValueError("margin must be >= 0")

    def with_margin(self, margin: int) -> "BorderPolicy":
        return BorderPolicy(self.mode, margin)


def pad_array(arr: np.ndarray, policy: BorderPolicy) -> np.ndarray:
    """Pad a bare 2-D array; the working form used by the stages."""
    if policy.margin == 0:
        return np.array(arr, copy=True)
    return np.pad(arr, policy.margin, mode=_NP_PAD_MODE[policy.mode])


def pad(image: RasterImage, policy: BorderPolicy) -> RasterImage:
    """Grow ``image`` by ``policy.margin`` pixels on every side.

    The interior is copied unchanged; the ring is filled by edge replication,
    mirror reflection (edge pixel not repeated) or zeros.
    """
    return RasterImage(pad_array(image.pixels, policy), image.bit_depth)


# -- file I/O ---------------------------------------------------------------

_PGM_HEADER = re.compile(
    rb"\AP5(?:\s|#[^\n]*\n)+(\d+)(?:\s|#[^\n]*\n)+(\d+)(?:\s|#[^\n]*\n)+(\d+)\s"
)


def _decode_pgm(data: bytes) -> RasterImage:
    m = _PGM_HEADER.match(data)
    if m is None:
        raise RasterFormatError("not a binary (P5) PGM header")
    width, height, maxval = (int(g) for g in m.groups())
    if width < 1 or height < 1:
        raise RasterFormatError(f"bad PGM dimensions {width}x{height}")
    if maxval == 255:
        dtype, depth = np.dtype(np.uint8), 8
    elif maxval == 65535:
        dtype, depth = np.dtype(">u2"), 16
    else:
        raise RasterFormatError(f"unsupported PGM maxval {maxval} (need 255 or 65535)")
    body = data[m.end():]
    need = width * height * dtype.itemsize
    if len(body) != need:
        raise RasterFormatError(f"PGM body has {len(body)} bytes, expected {need}")
    pixels = np.frombuffer(body, dtype=dtype).reshape(height, width)
    return RasterImage(pixels, depth)


def _decode_raw(data: bytes, width: int, height: int, bit_depth: int,
                big_endian: bool) -> RasterImage:
    if bit_depth not in _DTYPE:
        raise RasterFormatError(f"unsupported raw bit depth {bit_depth}")
    if width < 1 or height < 1:
        raise RasterFormatError(f"bad raw dimensions {width}x{height}")
    dtype = np.dtype(_DTYPE[bit_depth]).newbyteorder(">" if big_endian else "<")
    need = width * height * dtype.itemsize
    if len(data) != need:
        raise RasterFormatError(f"raw file has {len(data)} bytes, expected {need}")
    pixels = np.frombuffer(data, dtype=dtype).reshape(height, width)
    return RasterImage(pixels, bit_depth)


def read_image(path: str | os.PathLike, format: str = "pgm", *, width: int | None = None,
               height: int | None = None, bit_depth: int | None = None,
               big_endian: bool = False) -> RasterImage:
    """Read a P5 PGM or a headerless raw raster.

    Raw files need ``width``, ``height`` and ``bit_depth``; samples are
    little-endian unless ``big_endian`` is set.
    """
    with open(path, "rb") as fh:
        data = fh.read()
    if format == "pgm":
        return _decode_pgm(data)
    if format == "raw":
        if width is None or height is None or bit_depth is None:
            raise RasterFormatError("raw input requires width, height and bit_depth")
        return _decode_raw(data, width, height, bit_depth, big_endian)
    raise RasterFormatError(f"unknown format {format!r}")


def encode_pgm(image: RasterImage) -> bytes:
    header = f"P5\n{image.width} {image.height}\n{image.max_value}\n".encode("ascii")
    dtype = ">u2" if image.bit_depth == 16 else np.uint8
    return header + image.pixels.astype(dtype).tobytes()


def write_image(image: RasterImage, path: str | os.PathLike, format: str = "pgm", *,
                big_endian: bool = False) -> None:
    if format == "pgm":
        payload = encode_pgm(image)
    elif format == "raw":
        dtype = np.dtype(_DTYPE[image.bit_depth]).newbyteorder(">" if big_endian else "<")
        payload = image.pixels.astype(dtype).tobytes()
    else:
        raise RasterFormatError(f"unknown format {format!r}")
    with open(path, "wb") as fh:
        fh.write(payload)


def mask_to_image(mask: BinaryMask, bit_depth: int = 8) -> RasterImage:
    """Lift a mask to intensities: 0 for unset, full scale for set."""
    full = (1 << bit_depth) - 1
    return RasterImage(np.where(mask.bits, full, 0), bit_depth)


def write_mask(mask: BinaryMask, path: str | os.PathLike) -> None:
    write_image(mask_to_image(mask, 8), path, "pgm")
