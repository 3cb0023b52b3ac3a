"""Exit criteria for the package, one test (or group) per criterion.

A per-criterion PASS/FAIL/SKIP line is printed in the terminal summary.
Runtime budgets are checked after JIT warm-up (see ``conftest.warm_jit``).
"""

import csv
import itertools
import os
import time

import numpy as np
import pytest

from oracles import log_mp, plain_median_direct, stdev_two_pass, zero_cross_pixel
from rsfeat.backends import WorkPartition
from rsfeat.bench import bench, percent_speedup
from rsfeat.cli import cli_main
from rsfeat.kernels import make_log_kernel
from rsfeat.pipeline import PipelineConfig, run
from rsfeat.raster import RasterImage, read_image
from rsfeat.stages import HybridMedianParams, ZeroCrossingParams, hybrid_median, sample_stddev, \
    zero_crossings
from rsfeat.synthetic import block_bounds, make_test_image
from test_pipeline import boundary_distance


def usable_cores() -> int:
    if hasattr(os, "sched_getaffinity"):
        return len(os.sched_getaffinity(0))
    return os.cpu_count() or 1


@pytest.mark.criterion(1, "Kernel oracle")
def test_criterion_1_kernel_oracle():
    t0 = time.perf_counter()
    for sigma in (0.5, 1.0, 20.0):
        raw = make_log_kernel(sigma, 5, dc_correct=False).coeffs
        for y, x in itertools.product(range(-2, 3), repeat=2):
            ref = float(log_mp(x, y, sigma))
            got = raw[y + 2, x + 2]
            if ref == 0.0:
                assert got == 0.0
            else:
                assert abs(got - ref) / abs(ref) <= 1e-12, (sigma, x, y)
        assert abs(make_log_kernel(sigma, 5, dc_correct=True).coeffs.sum()) <= 1e-12
    assert time.perf_counter() - t0 < 1.0


@pytest.mark.criterion(2, "Zero-crossing rule (exhaustive)")
def test_criterion_2_zero_crossing_exhaustive():
    t0 = time.perf_counter()
    cases = [
        tuple(s * m for s, m in zip(signs, mags))
        for signs in itertools.product((1.0, -1.0), repeat=5)
        for mags in itertools.product((0.5, 1.0, 3.0), repeat=5)
    ]
    assert len(cases) == 2 ** 5 * 3 ** 5
    cols = 96
    rows = -(-len(cases) // cols)
    # every case gets its own 3x3 tile: centre plus up/down/left/right
    resp = np.full((3 * rows, 3 * cols), 1.0)
    for k, (c, up, down, left, right) in enumerate(cases):
        r0, c0 = 3 * (k // cols) + 1, 3 * (k % cols) + 1
        resp[r0, c0] = c
        resp[r0 - 1, c0], resp[r0 + 1, c0] = up, down
        resp[r0, c0 - 1], resp[r0, c0 + 1] = left, right
    checked = 0
    for thr in (0.0, 2.0, 4.5):
        mask = zero_crossings(resp, ZeroCrossingParams(thr)).bits
        for k, (c, *nb) in enumerate(cases):
            r0, c0 = 3 * (k // cols) + 1, 3 * (k % cols) + 1
            assert mask[r0, c0] == zero_cross_pixel(c, nb, thr), (thr, c, nb)
            checked += 1
    assert checked == 3 * len(cases)
    assert time.perf_counter() - t0 < 1.0


@pytest.mark.criterion(3, "Stddev on 10,000 windows")
def test_criterion_3_stddev():
    t0 = time.perf_counter()
    rng = np.random.default_rng(2024)
    windows = rng.uniform(0, 4095, size=(10_000, 5, 5))
    windows[::3] = np.round(windows[::3])
    worst = max(abs(sample_stddev(w) - stdev_two_pass(w)) for w in windows)
    assert worst <= 1e-10
    w = np.zeros((5, 5))
    w[2, 2] = 100
    assert sample_stddev(w) == 20.0
    assert time.perf_counter() - t0 < 5.0


@pytest.mark.criterion(4, "Hybrid median fixtures")
def test_criterion_4_hybrid_median():
    t0 = time.perf_counter()
    impulse = np.zeros((9, 9), np.uint8)
    impulse[4, 4] = 255
    out = hybrid_median(RasterImage(impulse), HybridMedianParams(5))
    assert not out.pixels.any()                                   # (a)

    line = np.zeros((11, 11), np.uint8)
    line[5, :] = 100
    out = hybrid_median(RasterImage(line), HybridMedianParams(5))
    assert np.array_equal(out.pixels, line)                       # (b)
    assert not plain_median_direct(line, 5).any()                 # (c)
    assert time.perf_counter() - t0 < 1.0


def random_case(rng):
    h, w = (int(v) for v in rng.integers(1, 257, size=2))
    if rng.random() < 0.2:
        h, w = (int(v) for v in rng.integers(1, 12, size=2))
    depth = int(rng.choice([8, 16]))
    full = (1 << depth) - 1
    base = rng.normal(0.3 * full, 0.02 * full, size=(h, w))
    for _ in range(int(rng.integers(1, 6))):
        r, c = rng.integers(0, h), rng.integers(0, w)
        base[r:r + int(rng.integers(2, 30)), c:c + int(rng.integers(2, 30))] += rng.uniform(-0.3, 0.5) * full
    noise = rng.random((h, w)) < 0.01
    base[noise] = rng.choice([0, full], size=int(noise.sum()))
    image = RasterImage(np.clip(np.rint(base), 0, full), depth)

    lo = float(rng.uniform(0.3, 3.0))
    auto = rng.random() < 0.6
    cfg = PipelineConfig(
        mode=str(rng.choice(["urban", "water"])),
        log_low=lo,
        log_high=float(rng.uniform(lo + 0.5, 25.0)),
        interpret_as_variance=bool(rng.random() < 0.3),
        kernel_size=int(rng.choice([3, 5, 7])),
        zc_threshold_low=None if auto else float(rng.uniform(0, 50)),
        zc_threshold_high=None if auto else float(rng.uniform(0, 5)),
        zc_relative=float(rng.uniform(0.2, 1.0)),
        sd_max_relative=float(rng.uniform(0.5, 1.5)),
        sd_accept_relative=float(rng.uniform(0.5, 2.0)),
        median_passes=[(5, 3), (3,), (7, 5, 3)][int(rng.integers(3))],
        border_mode=str(rng.choice(["replicate", "reflect", "zero"])),
    )
    return image, cfg


@pytest.mark.criterion(5, "Backend equivalence")
def test_criterion_5_backend_equivalence():
    t0 = time.perf_counter()
    rng = np.random.default_rng(5)
    nonempty = 0
    for _ in range(50):
        image, cfg = random_case(rng)
        ref = run(image, cfg.replace(backend="sequential"))
        nonempty += ref.combined_mask.any()
        for workers in (1, 2, 4, 8):
            got = run(image, cfg.replace(backend="row_parallel", workers=workers))
            assert got.same_outputs(ref), ("row_parallel", workers, cfg)
            for chunk in (1, 64, 512, 4096):
                got = run(image, cfg.replace(backend="pixel_parallel", workers=workers,
                                             chunk=chunk))
                assert got.same_outputs(ref), ("pixel_parallel", workers, chunk, cfg)
    # equality over empty masks proves little; most cases must carry detections
    assert nonempty >= 35
    assert time.perf_counter() - t0 < 120.0


@pytest.mark.criterion(6, "Throughput property")
def test_criterion_6_percent_convention():
    assert round(percent_speedup(3420, 446), 2) == 666.82


@pytest.fixture(scope="module")
def big_scene():
    return make_test_image("scene", 2000, seed=11)


@pytest.mark.slow
@pytest.mark.criterion(6, "Throughput property")
def test_criterion_6_parallel_beats_sequential(big_scene):
    cores = usable_cores()
    if cores < 4:
        pytest.skip(f"needs >= 4 cores, machine has {cores}")
    reports = bench(big_scene, PipelineConfig(), "sequential",
                    [WorkPartition("row_parallel", "auto"),
                     WorkPartition("pixel_parallel", "auto", 512)], repeats=3,
                    image_id="scene2000")
    seq, row, pix = reports
    assert all(r.valid for r in reports)
    assert pix.total_ms < seq.total_ms and pix.speedup_vs[1] >= 2.0
    assert row.total_ms < seq.total_ms
    assert pix.speedup_pct == pytest.approx(
        percent_speedup(seq.total_ms, pix.total_ms), rel=1e-12)


@pytest.mark.slow
@pytest.mark.criterion(7, "Chunk sweep")
def test_criterion_7_chunk_sweep(tmp_path, big_scene):
    t0 = time.perf_counter()
    from rsfeat.raster import write_image
    src = tmp_path / "scene2000.pgm"
    write_image(big_scene, src)
    out = tmp_path / "sweep.csv"
    code = cli_main(["bench", "--input", str(src), "--backend", "pixel_parallel",
                     "--workers", "auto", "--chunk", "256", "512", "1024",
                     "--repeats", "3", "--report", str(out)])
    assert code == 0
    with open(out, newline="") as fh:
        rows = list(csv.DictReader(fh))
    assert rows[0]["backend"] == "sequential"
    sweep = rows[1:]
    assert len(sweep) == 3
    assert [int(r["chunk"]) for r in sweep] == [256, 512, 1024]
    for r in sweep:
        assert r["valid"] == "True"
        assert r["backend"] == "pixel_parallel"
        assert (int(r["width"]), int(r["height"])) == (2000, 2000)
        assert float(r["speedup_ratio"]) > 0
        assert float(r["total_ms"]) > 0 and int(r["repeats"]) == 3
        for stage in ("log_low", "zc_low", "sd_low", "log_high", "zc_high", "sd_high"):
            assert float(r[f"{stage}_ms"]) >= 0
    assert time.perf_counter() - t0 < 120.0


@pytest.mark.criterion(8, "End-to-end smoke")
def test_criterion_8_end_to_end(tmp_path):
    t0 = time.perf_counter()
    block = tmp_path / "block.pgm"
    assert cli_main(["gen-test-image", "--kind", "block", "--size", "64",
                     "--output", str(block)]) == 0
    assert cli_main(["extract", "--mode", "urban", "--input", str(block),
                     "--out-prefix", str(tmp_path / "b_")]) == 0
    combined = read_image(tmp_path / "b_combined.pgm").pixels > 0
    assert combined.any()
    lo, hi = block_bounds(64)
    assert boundary_distance((64, 64), lo, hi)[combined].max() <= 4

    flat = tmp_path / "flat.pgm"
    assert cli_main(["gen-test-image", "--kind", "flat", "--size", "64",
                     "--output", str(flat)]) == 0
    assert cli_main(["extract", "--mode", "urban", "--input", str(flat),
                     "--out-prefix", str(tmp_path / "f_")]) == 0
    for name in ("features", "edges", "combined"):
        assert not read_image(tmp_path / f"f_{name}.pgm").pixels.any()
    assert time.perf_counter() - t0 < 10.0
