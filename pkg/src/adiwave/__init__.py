"""ADI solvers for the 2-D velocity-pressure acoustic wave equation.

Two fourth-order spatial discretizations share a Peaceman-Rachford ADI time
step: a nodal compact-difference scheme (``cfd``) and a staggered mimetic
scheme (``mfd``).
"""
from ._accel import backend_name
from .adi import AdiConfig, AdiStepStats
from .bench import BenchRecord, run_benchmark
from .convergence import (
    ConvergenceReport,
    Diverged,
    convergence_study,
    estimate_rates,
    run_case,
    trimmed_average,
)
from .errors import (
    AdiWaveError,
    ConfigError,
    NonFinite,
    NonPositiveError,
    ShapeMismatch,
    TooFewRates,
    TooSmallGrid,
    ZeroPivot,
)
from .fields import GridSpec, MaterialField, Scheme, WaveState
from .linalg import BandedOperator, frobenius_norm, lu_factor_tridiagonal, solve_batched
from .manufactured import ManufacturedCase, SampledCase
from .operators import build_cfd_operators, build_mimetic_operators
from .parallel import get_workers, set_workers, workers
from .solver_cfd import CfdStepper, adi_columns_cfd, adi_rows_cfd, cfd_time_step
from .solver_mfd import MfdStepper, adi_columns_mfd, adi_rows_mfd, mfd_time_step

__version__ = "0.1.0"
