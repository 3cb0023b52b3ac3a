"""Execution strategies for per-pixel stages.

A stage body receives an ``(k, 2)`` int64 array of ``[start, stop)`` runs of
flat (row-major) output indices and must fill exactly those output cells.
The strategies differ only in how the flat index space is cut into work
units and how the units are spread over worker threads:

* ``sequential``      one unit covering the whole image, run in the caller
* ``row_parallel``    one unit per image row
* ``pixel_parallel``  one unit per ``chunk`` consecutive pixels

Units are dealt to workers round-robin (unit ``u`` goes to worker
``u % workers``), so each worker makes a single body call per stage.  Bodies
compiled with ``nogil=True`` therefore run truly concurrently.  Since every
output cell is produced by one unit with the same arithmetic, results are
bit-identical across strategies, worker counts and chunk sizes.
"""

from __future__ import annotations

import os
import threading
from concurrent.futures import ThreadPoolExecutor, wait
from dataclasses import dataclass
from typing import Callable, Literal, Sequence

import numpy as np

Strategy = Literal["sequential", "row_parallel", "pixel_parallel"]
STRATEGIES: tuple[str, ...] = ("sequential", "row_parallel", "pixel_parallel")

SpanBody = Callable[[np.ndarray], None]


def resolve_workers(workers: int | str) -> int:
    if workers == "auto":
        return os.cpu_count() or 1
    workers = int(workers)
    if workers < 1:
        raise ValueError(f"workers must be >= 1, got {workers}")
    return workers


@dataclass(frozen=True)
class WorkPartition:
    strategy: Strategy = "sequential"
    workers: int | str = 1
    chunk: int = 512

    def __post_init__(self):
        if self.strategy not in STRATEGIES:
            raise ValueError(f"unknown strategy {self.strategy!r}")
        if self.workers != "auto":
            resolve_workers(self.workers)
        if int(self.chunk) < 1:
            raise ValueError(f"chunk must be >= 1, got {self.chunk}")

    @property
    def n_workers(self) -> int:
        return resolve_workers(self.workers)

    @property
    def label(self) -> str:
        if self.strategy == "sequential":
            return "sequential"
        if self.strategy == "row_parallel":
            return f"row_parallel[w={self.n_workers}]"
        return f"pixel_parallel[w={self.n_workers},chunk={self.chunk}]"

    def units(self, shape: tuple[int, int]) -> np.ndarray:
        """All work units for an image of ``shape`` as ``[start, stop)`` rows."""
        height, width = shape
        total = height * width
        if self.strategy == "sequential":
            return np.array([[0, total]], dtype=np.int64)
        step = width if self.strategy == "row_parallel" else int(self.chunk)
        starts = np.arange(0, total, step, dtype=np.int64)
        stops = np.minimum(starts + step, total)
        return np.stack([starts, stops], axis=1)

    def assignments(self, shape: tuple[int, int]) -> list[np.ndarray]:
        """Per-worker unit lists; workers with nothing to do are dropped."""
        units = self.units(shape)
        if self.strategy == "sequential":
            return [units]
        n = min(self.n_workers, len(units))
        return [np.ascontiguousarray(units[k::n]) for k in range(n)]


SEQUENTIAL = WorkPartition()

_pools: dict[int, ThreadPoolExecutor] = {}
_pools_lock = threading.Lock()


def _pool(workers: int) -> ThreadPoolExecutor:
    with _pools_lock:
        pool = _pools.get(workers)
        if pool is None:
            pool = ThreadPoolExecutor(max_workers=workers, thread_name_prefix=f"rsfeat-w{workers}")
            _pools[workers] = pool
        return pool


def global_index_to_coords(gid: int, width: int, height: int | None = None) -> tuple[int, int]:
    """Map a flat work-item index to ``(row, col)``: ``gid // width``, ``gid % width``."""
    if width < 1:
        raise ValueError("width must be >= 1")
    if gid < 0 or (height is not None and gid >= width * height):
        raise IndexError(f"global index {gid} outside image")
    return gid // width, gid % width


def for_each_output_pixel(shape: tuple[int, int], partition: WorkPartition,
                          body: SpanBody) -> None:
    """Run ``body`` over every output pixel exactly once under ``partition``.

    Returns after all workers have finished.  If any body call raises, the
    remaining calls still run to completion and the first failure (in worker
    order) is re-raised.
    """
    height, width = shape
    if height * width == 0:
        return
    jobs = partition.assignments(shape)
    if len(jobs) == 1:
        body(jobs[0])
        return
    futures = [_pool(partition.n_workers).submit(body, spans) for spans in jobs]
    wait(futures)
    for fut in futures:
        exc = fut.exception()
        if exc is not None:
            raise exc


def run_branches_concurrently(tasks: Sequence[Callable[[], object]],
                              concurrent: bool = True) -> list:
    """Run independent zero-argument callables, one thread each.

    Results come back in task order.  Every task is allowed to finish before
    the first failure is re-raised.
    """
    tasks = list(tasks)
    if not tasks:
        return []
    if not concurrent or len(tasks) == 1:
        return [task() for task in tasks]
    results: list = [None] * len(tasks)
    errors: list = [None] * len(tasks)

    def run(i):
        try:
            results[i] = tasks[i]()
        except BaseException as exc:  # re-raised in the caller thread
            errors[i] = exc

    threads = [threading.Thread(target=run, args=(i,), name=f"rsfeat-branch{i}")
               for i in range(len(tasks))]
    for t in threads:
        t.start()
    for t in threads:
        t.join()
    for exc in errors:
        if exc is not None:
            raise exc
    return results
