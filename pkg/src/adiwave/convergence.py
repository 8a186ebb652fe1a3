"""Manufactured-solution runs, error norms and convergence-rate estimates."""
import csv
import io
import math
import time
from dataclasses import dataclass, field

import numpy as np

from .adi import AdiConfig
from .errors import NonFinite, NonPositiveError, TooFewRates
from .fields import Scheme
from .linalg import frobenius_norm
from .solver_cfd import CfdStepper
from .solver_mfd import MfdStepper

DEFAULT_LADDER = (16, 24, 32, 48, 64, 96, 128, 256, 512, 1024)
DEFAULT_CFL = {Scheme.NODAL: 0.91, Scheme.STAGGERED: 0.81}
DEFAULT_PERIODS = 5

# a run is declared diverged once ||U|| exceeds this multiple of the exact
# solution's spatial amplitude
DIVERGENCE_FACTOR = 1e3

CSV_FIELDS = ("scheme", "gamma", "k", "N", "h", "dt", "steps", "error_fro", "rate",
              "avg_inner_iters", "wall_time_s")


class Diverged(NonFinite):
    def __init__(self, message, time=None, steps=None):
        super().__init__(message)
        self.time = time
        self.steps = steps


def make_stepper(scheme, N, case, cfg=None):
    scheme = Scheme.parse(scheme)
    if cfg is None:
        cfg = AdiConfig(cfl=DEFAULT_CFL[scheme])
    cls = CfdStepper if scheme is Scheme.NODAL else MfdStepper
    return cls(N, case, cfg=cfg)


def step_schedule(t_end, dt):
    """Step count and the last (possibly shortened) step landing on ``t_end``."""
    n = max(1, math.ceil(t_end / dt - 1e-9))
    last = t_end - (n - 1) * dt
    return n, last


@dataclass
class RunResult:
    scheme: Scheme
    N: int
    dt: float
    steps: int
    error: float
    wall_time: float
    inner_iters: list = field(default_factory=list)
    final_state: object = None

    @property
    def max_inner_iters(self):
        return max(self.inner_iters) if self.inner_iters else 0

    @property
    def mean_inner_iters(self):
        return float(np.mean(self.inner_iters)) if self.inner_iters else 0.0


def pressure_error(state, exact_U):
    """Frobenius norm of the interior pressure error."""
    return frobenius_norm(state.U[1:-1, 1:-1] - exact_U[1:-1, 1:-1])


def integrate(stepper, t_end, callback=None):
    """Run ``stepper`` from its exact initial state to ``t_end``.

    Returns ``(state, steps, per-stage inner iteration counts)``; raises
    :class:`Diverged` on NaN/Inf or runaway growth.
    """
    state = stepper.initial_state()
    n, last = step_schedule(t_end, stepper.dt)
    scale = max(frobenius_norm(stepper.sampled.U(0.0)), frobenius_norm(stepper.sampled._spatial_u), 1e-300)
    iters = []
    for m in range(n):
        dt = stepper.dt if m < n - 1 else last
        try:
            state, stats = stepper.step(state, dt)
        except NonFinite as exc:
            raise Diverged(f"diverged at step {m + 1} (t={state.time:.6g}): {exc}", state.time, m + 1) from exc
        iters.extend((stats.inner_iters_rows, stats.inner_iters_cols))
        norm = frobenius_norm(state.U)
        if not norm <= DIVERGENCE_FACTOR * scale:
            raise Diverged(
                f"diverged at step {m + 1} (t={state.time:.6g}): ||U|| = {norm:.3g}",
                state.time, m + 1,
            )
        if callback is not None:
            callback(m, state, stats)
    return state, n, iters


def run_case(scheme, case, N, cfg=None, periods=DEFAULT_PERIODS):
    """Integrate ``case`` over ``periods`` temporal periods and measure the
    final-time interior pressure error."""
    stepper = make_stepper(scheme, N, case, cfg)
    t_end = periods * case.period
    start = time.perf_counter()
    state, steps, iters = integrate(stepper, t_end)
    wall = time.perf_counter() - start
    error = pressure_error(state, stepper.sampled.U(t_end))
    return RunResult(stepper.scheme, N, stepper.dt, steps, error, wall, iters, state)


def estimate_rates(errors, Ns):
    """Observed orders between consecutive grids: ``ln(e0/e1) / ln(N1/N0)``."""
    errors = [float(e) for e in errors]
    Ns = [float(n) for n in Ns]
    if len(errors) != len(Ns):
        raise ValueError("errors and Ns must have the same length")
    if any(not e > 0 for e in errors):
        raise NonPositiveError("errors must be positive")
    if any(b <= a for a, b in zip(Ns, Ns[1:])):
        raise ValueError("Ns must be strictly increasing")
    return [math.log(e0 / e1) / math.log(n1 / n0)
            for e0, e1, n0, n1 in zip(errors, errors[1:], Ns, Ns[1:])]


def trimmed_average(rates):
    """Mean after dropping one highest and one lowest rate."""
    rates = list(rates)
    if len(rates) < 3:
        raise TooFewRates(f"need at least 3 rates, got {len(rates)}")
    rates.remove(max(rates))
    rates.remove(min(rates))
    return sum(rates) / len(rates)


@dataclass
class ConvergenceReport:
    scheme: Scheme
    case: object
    runs: list
    rates: list
    average: float

    @property
    def Ns(self):
        return [r.N for r in self.runs]

    @property
    def errors(self):
        return [r.error for r in self.runs]

    @property
    def weighted_rates(self):
        """Rates of the grid-weighted error ``h * ||E||_F`` (a discrete L2 norm).

        Informational only; the reported rates use the plain Frobenius norm.
        """
        if len(self.runs) < 2:
            return []
        return estimate_rates([r.error / r.N for r in self.runs], self.Ns)

    def rows(self):
        out = []
        for i, r in enumerate(self.runs):
            out.append({
                "scheme": self.scheme.label,
                "gamma": _fmt(self.case.gamma),
                "k": self.case.k,
                "N": r.N,
                "h": _fmt(1.0 / r.N),
                "dt": _fmt(r.dt),
                "steps": r.steps,
                "error_fro": _fmt(r.error),
                "rate": "" if i == 0 else _fmt(self.rates[i - 1]),
                "avg_inner_iters": _fmt(r.mean_inner_iters),
                "wall_time_s": f"{r.wall_time:.3f}",
            })
        return out

    def to_csv(self, timings=True):
        """CSV text: one row per grid plus an ``AVERAGE`` row.

        With ``timings=False`` the wall-time column is left empty so the
        output is byte-for-byte reproducible.
        """
        buf = io.StringIO()
        writer = csv.DictWriter(buf, fieldnames=CSV_FIELDS, lineterminator="\n")
        writer.writeheader()
        for row in self.rows():
            if not timings:
                row["wall_time_s"] = ""
            writer.writerow(row)
        avg = "" if self.average is None else _fmt(self.average)
        writer.writerow({"scheme": "AVERAGE", "rate": avg})
        return buf.getvalue()


def _fmt(x):
    return repr(float(x))


def convergence_study(scheme, case, Ns=DEFAULT_LADDER, cfg=None, periods=DEFAULT_PERIODS, progress=None):
    runs = []
    for N in Ns:
        runs.append(run_case(scheme, case, N, cfg, periods))
        if progress is not None:
            progress(runs[-1])
    rates = estimate_rates([r.error for r in runs], Ns) if len(runs) > 1 else []
    average = trimmed_average(rates) if len(rates) >= 3 else None
    return ConvergenceReport(Scheme.parse(scheme), case, runs, rates, average)
