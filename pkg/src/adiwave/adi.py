"""Shared pieces of the Peaceman-Rachford ADI step: configuration, statistics,
the coupled pressure/velocity fixed-point loop and boundary bookkeeping."""
import math
from dataclasses import dataclass, field

import numpy as np

from .errors import ConfigError, NonFinite
from .linalg import frobenius_norm

SEIDEL = "seidel"
JACOBI = "jacobi"

MIDPOINT = "midpoint"
CONSISTENT = "consistent"

COMPUTED = "computed"
PRESCRIBED = "prescribed"


@dataclass(frozen=True)
class AdiConfig:
    """Knobs of the inner fixed-point iteration.

    ``eps`` is relative: a stage stops once ``||dU|| + ||dV||`` falls to
    ``eps * ||U||`` (interior pressure at the start of the stage). Stopping is
    only tested from iteration ``min_iters_before_check`` on.

    ``edge_velocity`` decides whether the normal velocity on the domain edges
    comes from the one-sided boundary closure (``computed``) or from the
    boundary data (``prescribed``). ``None`` picks the scheme's default:
    prescribed for the nodal scheme, whose fully fourth-order closure is not
    stable otherwise, computed for the staggered one.
    """

    cfl: float = 0.91
    eps: float = 1e-9
    k_max: int = 8
    min_iters_before_check: int = 6
    coupling: str = SEIDEL
    intermediate_bc: str = MIDPOINT
    record_residuals: bool = False
    edge_velocity: str = None

    def __post_init__(self):
        # cfl > 1 is accepted on purpose: stability probes run past the limit
        if not self.cfl > 0:
            raise ConfigError(f"cfl must be positive, got {self.cfl}")
        if not self.eps > 0:
            raise ConfigError(f"eps must be positive, got {self.eps}")
        if not 1 <= self.min_iters_before_check <= self.k_max:
            raise ConfigError(
                f"need 1 <= min_iters_before_check ({self.min_iters_before_check}) "
                f"<= k_max ({self.k_max})"
            )
        if self.coupling not in (SEIDEL, JACOBI):
            raise ConfigError(f"coupling must be {SEIDEL!r} or {JACOBI!r}, got {self.coupling!r}")
        if self.intermediate_bc not in (MIDPOINT, CONSISTENT):
            raise ConfigError(f"intermediate_bc must be {MIDPOINT!r} or {CONSISTENT!r}, got {self.intermediate_bc!r}")
        if self.edge_velocity not in (None, COMPUTED, PRESCRIBED):
            raise ConfigError(f"edge_velocity must be {COMPUTED!r} or {PRESCRIBED!r}, got {self.edge_velocity!r}")

    def edges_prescribed(self, default):
        mode = self.edge_velocity or default
        return mode == PRESCRIBED



@dataclass
class AdiStepStats:
    inner_iters_rows: int = 0
    inner_iters_cols: int = 0
    final_residual_rows: float = 0.0
    final_residual_cols: float = 0.0
    converged_rows: bool = False
    converged_cols: bool = False
    residuals_rows: list = field(default_factory=list)
    residuals_cols: list = field(default_factory=list)

    @property
    def max_inner_iters(self):
        return max(self.inner_iters_rows, self.inner_iters_cols)


@dataclass
class StageResult:
    iters: int
    residual: float
    converged: bool
    history: list


def fixed_point(p_inner, vel, update_p, update_vel, cfg, eps_abs):
    """Resolve one ADI stage's pressure/velocity coupling in place.

    ``p_inner`` is a writable view of the interior pressure inside the full
    pressure buffer that ``update_vel`` reads; ``vel`` is the reduced velocity.
    ``update_p(vel)`` returns the next interior pressure, ``update_vel()`` the
    next velocity from whatever pressure currently sits in the buffer.
    """
    jacobi = cfg.coupling == JACOBI
    history = []
    residual = math.inf
    k = 0
    while True:
        check = cfg.record_residuals or k + 1 >= cfg.min_iters_before_check or k + 1 >= cfg.k_max
        if jacobi:
            vel_new = update_vel()
            p_new = update_p(vel)
        else:
            p_new = update_p(vel)
        if check:
            dp = frobenius_norm(p_new - p_inner)
        p_inner[...] = p_new
        if not jacobi:
            vel_new = update_vel()
        if check:
            residual = dp + frobenius_norm(vel_new - vel)
        vel[...] = vel_new
        k += 1
        if check:
            if not math.isfinite(residual):
                raise NonFinite(f"fixed-point residual became {residual} at iteration {k}")
            history.append(residual)
            if k >= cfg.min_iters_before_check and residual <= eps_abs:
                return StageResult(k, residual, True, history)
        if k >= cfg.k_max:
            return StageResult(k, residual, residual <= eps_abs, history)


def check_finite(*arrays):
    for a in arrays:
        if not np.all(np.isfinite(a)):
            raise NonFinite("field developed NaN/Inf")


def time_step_size(N, cfl, c_max=1.0):
    return cfl / (N * c_max)
