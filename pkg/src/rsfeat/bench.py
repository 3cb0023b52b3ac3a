"""Wall-clock benchmark harness comparing execution strategies.

Each partition is run once as warm-up (discarded, it also triggers JIT
compilation) and then ``repeats`` times; per-stage and total times are the
medians over the timed runs.  Candidate outputs must equal the baseline's
bit for bit, otherwise no speedup is reported.
"""

from __future__ import annotations

import csv
import json
import os
import statistics
from dataclasses import asdict, dataclass

from .backends import WorkPartition
from .pipeline import PipelineConfig, PipelineResult, run
from .raster import RasterImage

STAGE_ORDER = ("log_low", "zc_low", "sd_low", "log_high", "zc_high", "sd_high",
               "combine", "median")
BASE_COLUMNS = ("image_id", "width", "height", "backend", "workers", "chunk", "repeats",
                "transfer_ms", "total_ms", "baseline", "speedup_ratio", "speedup_pct", "valid")


class OutputMismatchError(RuntimeError):
    """A candidate strategy produced outputs different from the baseline."""

    def __init__(self, message: str, reports: list["BenchReport"]):
        super().__init__(message)
        self.reports = reports


def speedup_ratio(baseline_ms: float, candidate_ms: float) -> float:
    return baseline_ms / candidate_ms


def percent_speedup(baseline_ms: float, candidate_ms: float) -> float:
    """Percent gain measured against the faster time: ``100 * (old - new) / new``.

    >>> round(percent_speedup(3420, 446), 2)
    666.82
    """
    return 100.0 * (baseline_ms - candidate_ms) / candidate_ms


@dataclass
class BenchReport:
    image_id: str
    width: int
    height: int
    backend: str
    workers: int
    chunk: int
    per_stage_ms: dict[str, float]
    transfer_ms: float
    total_ms: float
    repeats: int
    speedup_vs: tuple[str, float] | None = None
    valid: bool = True

    def __post_init__(self):
        if self.repeats < 1:
            raise ValueError("repeats must be >= 1")
        if self.speedup_vs is not None:
            self.speedup_vs = (str(self.speedup_vs[0]), float(self.speedup_vs[1]))
            if not self.speedup_vs[1] > 0:
                raise ValueError("speedup ratio must be > 0")

    @property
    def dims(self) -> str:
        return f"{self.width}x{self.height}"

    @property
    def speedup_pct(self) -> float | None:
        # ratio r = old/new, so 100*(old-new)/new = 100*(r-1)
        return None if self.speedup_vs is None else 100.0 * (self.speedup_vs[1] - 1.0)

    def to_dict(self) -> dict:
        d = asdict(self)
        d["dims"] = self.dims
        d["speedup_vs"] = None if self.speedup_vs is None else {
            "baseline": self.speedup_vs[0], "ratio": self.speedup_vs[1],
            "percent": self.speedup_pct}
        return d

    @classmethod
    def from_dict(cls, d: dict) -> "BenchReport":
        d = dict(d)
        d.pop("dims", None)
        sv = d.get("speedup_vs")
        d["speedup_vs"] = None if sv is None else (sv["baseline"], sv["ratio"])
        return cls(**d)


def median_timings(runs: list[dict[str, float]]) -> dict[str, float]:
    """Per-key median over repeated runs; insensitive to run order."""
    keys = [k for k in runs[0] if all(k in r for r in runs)]
    return {k: statistics.median(r[k] for r in runs) for k in keys}


def _measure(image: RasterImage, config: PipelineConfig, partition: WorkPartition,
             repeats: int, warmup: bool) -> tuple[PipelineResult, dict[str, float]]:
    cfg = config.replace(backend=partition.strategy, workers=partition.n_workers,
                         chunk=partition.chunk)
    if warmup:
        run(image, cfg)
    runs = []
    first = None
    for _ in range(repeats):
        result = run(image, cfg)
        if first is None:
            first = result
        runs.append(result.timings)
    return first, median_timings(runs)


def _report(image_id: str, image: RasterImage, partition: WorkPartition,
            timings: dict[str, float], repeats: int) -> BenchReport:
    stages = {k: v for k, v in timings.items() if k not in ("total", "transfer")}
    return BenchReport(image_id, image.width, image.height, partition.strategy,
                       partition.n_workers if partition.strategy != "sequential" else 1,
                       partition.chunk, stages, timings.get("transfer", 0.0),
                       timings["total"], repeats)


def bench(image: RasterImage, config: PipelineConfig,
          baseline: WorkPartition | str = "sequential",
          candidates: list[WorkPartition] | None = None, repeats: int = 5,
          image_id: str = "image", warmup: bool = True) -> list[BenchReport]:
    """Time ``baseline`` and every candidate partition on the same input.

    Returns the baseline report followed by one report per candidate, each
    carrying ``speedup_vs = (baseline label, baseline_total / candidate_total)``.
    Raises :class:`OutputMismatchError` as soon as a candidate's masks or
    denoised image differ from the baseline's.
    """
    if repeats < 1:
        raise ValueError("repeats must be >= 1")
    if isinstance(baseline, str):
        baseline = WorkPartition(baseline, config.workers, config.chunk)
    candidates = list(candidates or [])

    ref, base_t = _measure(image, config, baseline, repeats, warmup)
    base_report = _report(image_id, image, baseline, base_t, repeats)
    reports = [base_report]
    for part in candidates:
        result, t = _measure(image, config, part, repeats, warmup)
        rep = _report(image_id, image, part, t, repeats)
        if not result.same_outputs(ref):
            rep.valid = False
            reports.append(rep)
            raise OutputMismatchError(
                f"{part.label} output differs from baseline {baseline.label}", reports)
        rep.speedup_vs = (baseline.label, speedup_ratio(base_report.total_ms, rep.total_ms))
        reports.append(rep)
    return reports


# -- report files --------------------------------------------------------------------

def _stage_columns(reports: list[BenchReport]) -> list[str]:
    seen = {k for r in reports for k in r.per_stage_ms}
    ordered = [s for s in STAGE_ORDER if s in seen]
    return ordered + sorted(seen - set(ordered))


def report_rows(reports: list[BenchReport]) -> tuple[list[str], list[dict]]:
    stages = _stage_columns(reports)
    header = list(BASE_COLUMNS) + [f"{s}_ms" for s in stages]
    rows = []
    for r in reports:
        row = {"image_id": r.image_id, "width": r.width, "height": r.height,
               "backend": r.backend, "workers": r.workers, "chunk": r.chunk,
               "repeats": r.repeats, "transfer_ms": r.transfer_ms, "total_ms": r.total_ms,
               "baseline": r.speedup_vs[0] if r.speedup_vs else "",
               "speedup_ratio": r.speedup_vs[1] if r.speedup_vs else "",
               "speedup_pct": r.speedup_pct if r.speedup_vs else "",
               "valid": r.valid}
        row.update({f"{s}_ms": r.per_stage_ms.get(s, "") for s in stages})
        rows.append(row)
    return header, rows


def write_report(reports: list[BenchReport], format: str, path: str | os.PathLike) -> None:
    """Write reports as a JSON array or a CSV table with one row per report."""
    if format == "json":
        with open(path, "w", encoding="utf-8") as fh:
            json.dump([r.to_dict() for r in reports], fh, indent=2)
            fh.write("\n")
    elif format == "csv":
        header, rows = report_rows(reports)
        with open(path, "w", newline="", encoding="utf-8") as fh:
            writer = csv.DictWriter(fh, fieldnames=header)
            writer.writeheader()
            writer.writerows(rows)
    else:
        raise ValueError(f"unknown report format {format!r}")


def read_report_json(path: str | os.PathLike) -> list[BenchReport]:
    with open(path, encoding="utf-8") as fh:
        return [BenchReport.from_dict(d) for d in json.load(fh)]


def format_table(reports: list[BenchReport]) -> str:
    lines = [f"{'backend':<36} {'total ms':>10} {'ratio':>7} {'% speed-up':>11}"]
    for r in reports:
        label = r.backend if r.backend == "sequential" else \
            f"{r.backend}[w={r.workers}" + (f",chunk={r.chunk}]" if r.backend == "pixel_parallel" else "]")
        ratio = f"{r.speedup_vs[1]:.2f}" if r.speedup_vs else "-"
        pct = f"{r.speedup_pct:.2f}" if r.speedup_vs else "-"
        lines.append(f"{label:<36} {r.total_ms:>10.1f} {ratio:>7} {pct:>11}")
    return "\n".join(lines)
