"""Wall-clock timing of the ADI step loop for different worker counts."""
import csv
import io
import time
from dataclasses import dataclass

import numpy as np

from . import parallel
from .convergence import make_stepper
from .fields import Scheme

BENCH_FIELDS = ("scheme", "N", "workers", "steps", "wall_time_s", "speedup")


@dataclass
class BenchRecord:
    scheme: Scheme
    N: int
    workers: int
    steps: int
    wall_time: float
    speedup: float = 1.0
    final_U: np.ndarray = None

    def __post_init__(self):
        if self.steps < 1:
            raise ValueError("steps must be >= 1")
        if not self.wall_time > 0:
            raise ValueError("wall time must be positive")

    def row(self):
        return {
            "scheme": Scheme.parse(self.scheme).label,
            "N": self.N,
            "workers": self.workers,
            "steps": self.steps,
            "wall_time_s": f"{self.wall_time:.6f}",
            "speedup": f"{self.speedup:.3f}",
        }


def run_benchmark(scheme, case, N, workers=1, steps=10, cfg=None, warmup=1):
    """Time ``steps`` ADI steps with a pool of ``workers`` threads.

    Operator assembly and ``warmup`` untimed steps (which also trigger JIT
    compilation) happen before the clock starts.
    """
    if steps < 1:
        raise ValueError(f"steps must be >= 1, got {steps}")
    if workers < 1:
        raise ValueError(f"workers must be >= 1, got {workers}")
    with parallel.workers(workers):
        stepper = make_stepper(scheme, N, case, cfg)
        state = stepper.initial_state()
        for _ in range(warmup):
            stepper.step(state)
        start = time.perf_counter()
        for _ in range(steps):
            state, _ = stepper.step(state)
        wall = time.perf_counter() - start
    return BenchRecord(stepper.scheme, N, workers, steps, max(wall, 1e-9), 1.0, state.U)


def benchmark_series(scheme, case, N, worker_counts=(1, 2, 4), steps=10, cfg=None):
    """One record per worker count, speedups relative to a 1-worker run.

    A sequential baseline is run first when ``1`` is not in ``worker_counts``
    so the speedup column always has the same reference.
    """
    counts = list(worker_counts)
    base = run_benchmark(scheme, case, N, 1, steps, cfg)
    records = []
    for w in counts:
        rec = base if w == 1 else run_benchmark(scheme, case, N, w, steps, cfg)
        rec.speedup = base.wall_time / rec.wall_time
        records.append(rec)
    return records


def max_relative_difference(records):
    """Largest ``||U_w - U_1||_F / ||U_1||_F`` over a series."""
    ref = records[0].final_U
    scale = np.linalg.norm(ref)
    return max(np.linalg.norm(r.final_U - ref) / scale for r in records)


def records_to_csv(records):
    buf = io.StringIO()
    writer = csv.DictWriter(buf, fieldnames=BENCH_FIELDS, lineterminator="\n")
    writer.writeheader()
    for r in records:
        writer.writerow(r.row())
    return buf.getvalue()
