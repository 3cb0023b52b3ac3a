"""Urban-area and water-body extraction pipelines.

Both pipelines share the two-branch front end::

    image -> LoG(low)  -> zero crossings -> stddev classify -> feature mask
          -> LoG(high) -> zero crossings -> stddev classify -> edge mask
    combined = feature | edge

The water pipeline then renders ``combined`` as a 0/full-scale image and runs
the hybrid median schedule over it.
"""

from __future__ import annotations

import configparser
import dataclasses
import math
import os
import time
from dataclasses import dataclass, field

import numpy as np

from .backends import STRATEGIES, WorkPartition, resolve_workers, run_branches_concurrently
from .kernels import LoGKernel, branch_sigma, make_log_kernel
from .raster import BinaryMask, BorderPolicy, RasterImage, mask_to_image
from .stages import (HybridMedianParams, StdDevParams, ZeroCrossingParams, combine_masks,
                     convolve, hybrid_median, stddev_classify, zero_crossings)


class ConfigError(ValueError):
    def __init__(self, violations: list[str]):
        super().__init__("invalid pipeline config: " + "; ".join(violations))
        self.violations = violations


@dataclass(frozen=True)
class PipelineConfig:
    """Every tunable of a run.

    Thresholds left as ``None`` are derived per branch from the LoG response:
    the zero-crossing gap threshold is ``zc_relative`` times the response's
    global standard deviation, the stddev thresholds are ``sd_max_relative``
    and ``sd_accept_relative`` times the same quantity.
    """

    mode: str = "urban"
    log_low: float = 0.5
    log_high: float = 20.0
    interpret_as_variance: bool = False
    kernel_size: int = 5
    dc_correct: bool = True
    zc_threshold_low: float | None = None
    zc_threshold_high: float | None = None
    zc_relative: float = 0.75
    sd_max_low: float | None = None
    sd_accept_low: float | None = None
    sd_max_high: float | None = None
    sd_accept_high: float | None = None
    sd_max_relative: float = 1.0
    sd_accept_relative: float = 1.5
    median_passes: tuple[int, ...] = (5, 3)
    border_mode: str = "replicate"
    backend: str = "sequential"
    workers: int | str = "auto"
    chunk: int = 512

    def replace(self, **changes) -> "PipelineConfig":
        return dataclasses.replace(self, **changes)

    @property
    def partition(self) -> WorkPartition:
        return WorkPartition(self.backend, self.workers, self.chunk)


def validate(config: PipelineConfig) -> list[str]:
    """Return a message for every violated constraint; empty when runnable."""
    problems = []
    if config.mode not in ("urban", "water"):
        problems.append(f"mode must be 'urban' or 'water', got {config.mode!r}")
    for name in ("log_low", "log_high"):
        v = getattr(config, name)
        if not (isinstance(v, (int, float)) and math.isfinite(v) and v > 0):
            problems.append(f"{name} must be a positive number, got {v!r}")
    if not config.log_low < config.log_high:
        problems.append(f"log_low ({config.log_low}) must be smaller than log_high ({config.log_high})")
    if int(config.kernel_size) != config.kernel_size or config.kernel_size < 3 \
            or config.kernel_size % 2 == 0:
        problems.append(f"kernel_size must be an odd integer >= 3, got {config.kernel_size}")
    for name in ("zc_threshold_low", "zc_threshold_high"):
        v = getattr(config, name)
        if v is not None and not v >= 0:
            problems.append(f"{name} must be >= 0, got {v}")
    for name in ("sd_max_low", "sd_accept_low", "sd_max_high", "sd_accept_high",
                 "sd_max_relative", "sd_accept_relative"):
        v = getattr(config, name)
        if v is not None and not v > 0:
            problems.append(f"{name} must be > 0, got {v}")
    if not config.zc_relative >= 0:
        problems.append(f"zc_relative must be >= 0, got {config.zc_relative}")
    if not config.median_passes:
        problems.append("median_passes must list at least one window")
    for w in config.median_passes:
        if w < 3 or w % 2 == 0:
            problems.append(f"median_passes entries must be odd and >= 3, got {w}")
    if config.border_mode not in ("replicate", "reflect", "zero"):
        problems.append(f"border_mode must be replicate, reflect or zero, got {config.border_mode!r}")
    if config.backend not in STRATEGIES:
        problems.append(f"backend must be one of {', '.join(STRATEGIES)}, got {config.backend!r}")
    try:
        resolve_workers(config.workers)
    except (TypeError, ValueError):
        problems.append(f"workers must be a positive integer or 'auto', got {config.workers!r}")
    if int(config.chunk) != config.chunk or config.chunk < 1:
        problems.append(f"chunk must be a positive integer, got {config.chunk}")
    return problems


# -- key=value config files ------------------------------------------------------

_FIELD_TYPES = {f.name: f.type for f in dataclasses.fields(PipelineConfig)}


def _parse_value(key: str, text: str):
    text = text.strip()
    kind = _FIELD_TYPES[key]
    if kind == "bool":
        return text.lower() in ("1", "true", "yes", "on")
    if kind == "int":
        return int(text)
    if kind == "float":
        return float(text)
    if kind == "float | None":
        return None if text.lower() in ("", "auto", "none") else float(text)
    if kind == "int | str":
        return text if text == "auto" else int(text)
    if kind == "tuple[int, ...]":
        return tuple(int(t) for t in text.replace(",", " ").split())
    return text


def config_from_mapping(values: dict, base: PipelineConfig | None = None) -> PipelineConfig:
    """Build a config from string (or already typed) values keyed by field name."""
    base = base or PipelineConfig()
    changes = {}
    for key, raw in values.items():
        key = key.strip().replace("-", "_")
        if key not in _FIELD_TYPES:
            raise ConfigError([f"unknown config key {key!r}"])
        try:
            changes[key] = _parse_value(key, raw) if isinstance(raw, str) else raw
        except ValueError as exc:
            raise ConfigError([f"{key}: {exc}"]) from None
    return base.replace(**changes)


def load_config(path: str | os.PathLike, base: PipelineConfig | None = None) -> PipelineConfig:
    """Read a ``key = value`` file (``#`` comments allowed, no sections)."""
    parser = configparser.ConfigParser(interpolation=None, comment_prefixes=("#", ";"),
                                       inline_comment_prefixes=("#",))
    with open(path, encoding="utf-8") as fh:
        parser.read_string("[pipeline]\n" + fh.read())
    return config_from_mapping(dict(parser["pipeline"]), base)


def dump_config(config: PipelineConfig) -> str:
    lines = []
    for f in dataclasses.fields(config):
        v = getattr(config, f.name)
        if isinstance(v, tuple):
            v = ",".join(str(x) for x in v)
        elif v is None:
            v = "auto"
        lines.append(f"{f.name} = {v}")
    return "\n".join(lines) + "\n"


# -- running -----------------------------------------------------------------------

@dataclass
class PipelineResult:
    feature_mask: BinaryMask
    edge_mask: BinaryMask
    combined_mask: BinaryMask
    denoised: RasterImage | None = None
    timings: dict[str, float] = field(default_factory=dict)  # milliseconds

    @property
    def total_ms(self) -> float:
        return self.timings.get("total", 0.0)

    def same_outputs(self, other: "PipelineResult") -> bool:
        return (self.feature_mask == other.feature_mask and self.edge_mask == other.edge_mask
                and self.combined_mask == other.combined_mask
                and self.denoised == other.denoised)


@dataclass(frozen=True)
class BranchSettings:
    kernel: LoGKernel
    zc_threshold: float | None
    sd_max: float | None
    sd_accept: float | None
    zc_relative: float = 0.75
    sd_max_relative: float = 1.0
    sd_accept_relative: float = 1.5


def _ms(t0: float) -> float:
    return (time.perf_counter() - t0) * 1e3


def run_branch(source: np.ndarray, settings: BranchSettings, border_mode: str,
               partition: WorkPartition, timings: dict | None = None,
               tag: str = "") -> BinaryMask:
    """LoG -> zero crossings -> stddev classification for one parameter set."""
    timings = {} if timings is None else timings
    t0 = time.perf_counter()
    response = convolve(source, settings.kernel,
                        BorderPolicy(border_mode, settings.kernel.radius), partition)
    timings[f"log{tag}"] = _ms(t0)

    spread = float(np.std(response))
    t0 = time.perf_counter()
    zc_thr = settings.zc_threshold
    if zc_thr is None:
        zc_thr = settings.zc_relative * spread
    candidates = zero_crossings(response, ZeroCrossingParams(zc_thr),
                                BorderPolicy(border_mode, 1), partition)
    timings[f"zc{tag}"] = _ms(t0)

    t0 = time.perf_counter()
    # a flat response has no candidates; keep derived thresholds strictly positive
    floor = np.finfo(np.float64).tiny
    sd_max = settings.sd_max if settings.sd_max is not None \
        else max(settings.sd_max_relative * spread, floor)
    sd_acc = settings.sd_accept if settings.sd_accept is not None \
        else max(settings.sd_accept_relative * spread, floor)
    mask = stddev_classify(response, candidates, StdDevParams(sd_max, sd_acc),
                           BorderPolicy(border_mode, 2), partition)
    timings[f"sd{tag}"] = _ms(t0)
    return mask


def branch_settings(config: PipelineConfig) -> tuple[BranchSettings, BranchSettings]:
    low = make_log_kernel(branch_sigma(config.log_low, config.interpret_as_variance),
                          config.kernel_size, config.dc_correct)
    high = make_log_kernel(branch_sigma(config.log_high, config.interpret_as_variance),
                           config.kernel_size, config.dc_correct)
    rel = dict(zc_relative=config.zc_relative, sd_max_relative=config.sd_max_relative,
               sd_accept_relative=config.sd_accept_relative)
    return (BranchSettings(low, config.zc_threshold_low, config.sd_max_low,
                           config.sd_accept_low, **rel),
            BranchSettings(high, config.zc_threshold_high, config.sd_max_high,
                           config.sd_accept_high, **rel))


def _check(config: PipelineConfig, mode: str) -> None:
    problems = validate(config)
    if config.mode != mode:
        problems.append(f"config.mode is {config.mode!r}, expected {mode!r}")
    if problems:
        raise ConfigError(problems)


def _front_end(image: RasterImage, config: PipelineConfig) -> PipelineResult:
    wall = time.perf_counter()
    partition = config.partition

    t0 = time.perf_counter()
    source = np.ascontiguousarray(image.pixels, dtype=np.float64)
    transfer = _ms(t0)

    low, high = branch_settings(config)
    t_low: dict[str, float] = {}
    t_high: dict[str, float] = {}
    features, edges = run_branches_concurrently(
        [lambda: run_branch(source, low, config.border_mode, partition, t_low, "_low"),
         lambda: run_branch(source, high, config.border_mode, partition, t_high, "_high")],
        concurrent=config.backend != "sequential")

    t0 = time.perf_counter()
    combined = combine_masks(features, edges)
    timings = {**t_low, **t_high, "combine": _ms(t0), "transfer": transfer}
    timings["total"] = _ms(wall)
    return PipelineResult(features, edges, combined, None, timings)


def run_urban(image: RasterImage, config: PipelineConfig = PipelineConfig()) -> PipelineResult:
    """Urban-area detection: both LoG branches and their union."""
    _check(config, "urban")
    return _front_end(image, config)


def run_water(image: RasterImage, config: PipelineConfig = PipelineConfig(mode="water")
              ) -> PipelineResult:
    """Water-body extraction: the urban front end followed by multi-pass hybrid median."""
    _check(config, "water")
    wall = time.perf_counter()
    result = _front_end(image, config)
    t0 = time.perf_counter()
    lifted = mask_to_image(result.combined_mask, image.bit_depth)
    result.denoised = hybrid_median(lifted, HybridMedianParams(passes=config.median_passes),
                                    BorderPolicy(config.border_mode, 0), config.partition)
    result.timings["median"] = _ms(t0)
    result.timings["total"] = _ms(wall)
    return result


def run(image: RasterImage, config: PipelineConfig) -> PipelineResult:
    return run_water(image, config) if config.mode == "water" else run_urban(image, config)
