"""Automated feature extraction from panchromatic and single-band satellite rasters.

Two LoG branches (fine and coarse) feed zero-crossing detection and a
neighbourhood standard-deviation test; their union maps urban structure, and a
multi-pass hybrid median over that union extracts water bodies.  Every
per-pixel stage runs under interchangeable sequential, row-parallel and
chunked pixel-parallel backends with bit-identical results.
"""

from .backends import (WorkPartition, for_each_output_pixel, global_index_to_coords,
                       run_branches_concurrently)
from .bench import BenchReport, OutputMismatchError, percent_speedup, write_report
from .kernels import LoGKernel, default_kernels, make_log_kernel
from .pipeline import (ConfigError, PipelineConfig, PipelineResult, load_config, run,
                       run_urban, run_water, validate)
from .raster import (BinaryMask, BorderPolicy, RasterFormatError, RasterImage, pad,
                     read_image, write_image, write_mask)
from .stages import (HybridMedianParams, StdDevParams, ZeroCrossingParams, combine_masks,
                     convolve, hybrid_median, sample_stddev, stddev_classify, zero_crossings)
from .synthetic import make_test_image

__version__ = "0.1.0"
