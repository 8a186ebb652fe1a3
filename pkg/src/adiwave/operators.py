"""Fourth-order compact (nodal) and mimetic (staggered) differentiation matrices.

Coefficients are written as exact fractions and converted to floats once, so
row sums and polynomial exactness can be checked in rational arithmetic.
"""
from dataclasses import dataclass
from fractions import Fraction as Fr

import numpy as np

from .errors import ShapeMismatch, TooSmallGrid
from .linalg import (
    BandedOperator,
    TridiagonalFactorization,
    banded_times_dense,
    dense_times_banded_transpose,
    lu_factor_tridiagonal,
    solve_batched,
)

MIN_N = 8

# compact scheme, full nodal grid: P v' = Q v / h
CFD_P_INTERIOR = (Fr(1), Fr(4), Fr(1))
CFD_P_FIRST = (Fr(6), Fr(18))
CFD_Q_INTERIOR = (Fr(-3), Fr(0), Fr(3))
CFD_Q_FIRST = (Fr(-17), Fr(9), Fr(9), Fr(-1))

# compact scheme restricted to interior nodes x_1 .. x_{N-1}
CFD_PBAR_FIRST = (Fr(6), Fr(6))
CFD_QBAR_FIRST = (Fr(-1), Fr(-9), Fr(9), Fr(1))

# staggered stencil shared by the interior rows of D and G
MIMETIC_INTERIOR = (Fr(1, 24), Fr(-9, 8), Fr(9, 8), Fr(-1, 24))

MIMETIC_D_FIRST = (
    Fr(-4751, 5192), Fr(909, 1298), Fr(6091, 15576),
    Fr(-1165, 5192), Fr(129, 2596), Fr(-25, 15576),
)
MIMETIC_G_FIRST = (
    Fr(-47888, 14245), Fr(1790, 407), Fr(-14545, 9768),
    Fr(8997, 16280), Fr(-2335, 22792), Fr(25, 9768),
)
MIMETIC_G_SECOND = (Fr(16, 105), Fr(-31, 24), Fr(29, 24), Fr(-3, 40), Fr(1, 168))


def mirror(row):
    """Coefficients of the opposite-edge row: reversed and negated."""
    return tuple(-c for c in reversed(row))


def _dense_row(cols, start, coeffs):
    row = np.zeros(cols)
    row[start:start + len(coeffs)] = [float(c) for c in coeffs]
    return row


def _check_n(N):
    if int(N) != N or N < MIN_N:
        raise TooSmallGrid(f"N must be an integer >= {MIN_N}, got {N}")


@dataclass(frozen=True, eq=False)
class Tridiagonal:
    """A tridiagonal matrix kept both as a multipliable operator and as LU factors."""

    op: BandedOperator
    fact: TridiagonalFactorization

    @classmethod
    def build(cls, n, interior, first):
        lower = np.full(n - 1, float(interior[0]))
        main = np.full(n, float(interior[1]))
        upper = np.full(n - 1, float(interior[2]))
        main[0], upper[0] = float(first[0]), float(first[1])
        # the last row is the first row reflected: (..., first[1], first[0])
        lower[-1], main[-1] = float(first[1]), float(first[0])
        band = np.vstack([np.r_[0.0, lower], main, np.r_[upper, 0.0]])
        op = BandedOperator(n, n, 1, 1, band)
        return cls(op, lu_factor_tridiagonal(lower, main, upper))

    @property
    def n(self):
        return self.fact.n

    def to_dense(self):
        return self.op.to_dense()


@dataclass(frozen=True, eq=False)
class CfdOperatorSet:
    N: int
    h: float
    P: Tridiagonal
    Q: BandedOperator
    Pbar: Tridiagonal
    Qbar: BandedOperator

    # derivative helpers: "rows" differentiate along x (each row of M is a
    # grid line), "cols" along y

    def dx_full(self, M, out=None):
        """Derivative at all N+1 nodes of each row: solve ``D P^T = M Q^T``."""
        rhs = dense_times_banded_transpose(M, self.Q, out=out)
        return solve_batched(self.P.fact, rhs, "rows", out=rhs)

    def dx_reduced(self, M, out=None):
        """Derivative at the N-1 interior nodes of each row."""
        rhs = dense_times_banded_transpose(M, self.Qbar, out=out)
        return solve_batched(self.Pbar.fact, rhs, "rows", out=rhs)

    def dy_full(self, M, out=None):
        rhs = banded_times_dense(self.Q, M, out=out)
        return solve_batched(self.P.fact, rhs, "columns", out=rhs)

    def dy_reduced(self, M, out=None):
        rhs = banded_times_dense(self.Qbar, M, out=out)
        return solve_batched(self.Pbar.fact, rhs, "columns", out=rhs)


@dataclass(frozen=True, eq=False)
class MimeticOperatorSet:
    N: int
    h: float
    D: BandedOperator
    G: BandedOperator


def build_cfd_operators(N, h=None):
    """P, Q (full nodal grid) and Pbar, Qbar (interior nodes) for ``N`` cells."""
    _check_n(N)
    N = int(N)
    h = 1.0 / N if h is None else float(h)
    n = N + 1
    P = Tridiagonal.build(n, CFD_P_INTERIOR, CFD_P_FIRST)
    Q = BandedOperator.from_stencil(
        n, n, [float(c) for c in CFD_Q_INTERIOR], -1,
        boundary_rows=[
            (0, _dense_row(n, 0, CFD_Q_FIRST)),
            (n - 1, _dense_row(n, n - 4, mirror(CFD_Q_FIRST))),
        ],
        scale=1.0 / h,
    )
    m = N - 1
    Pbar = Tridiagonal.build(m, CFD_P_INTERIOR, CFD_PBAR_FIRST)
    # row r sits at node r + 1 and reads nodes r .. r + 2
    Qbar = BandedOperator.from_stencil(
        m, n, [float(c) for c in CFD_Q_INTERIOR], 0,
        boundary_rows=[
            (0, _dense_row(n, 0, CFD_QBAR_FIRST)),
            (m - 1, _dense_row(n, n - 4, mirror(CFD_QBAR_FIRST))),
        ],
        scale=1.0 / h,
    )
    return CfdOperatorSet(N, h, P, Q, Pbar, Qbar)


def build_mimetic_operators(N, h=None):
    """Divergence D (N x N+1, nodes to centers) and gradient G (N+1 x N+2,
    centers-plus-edges to nodes)."""
    _check_n(N)
    N = int(N)
    h = 1.0 / N if h is None else float(h)
    interior = [float(c) for c in MIMETIC_INTERIOR]
    D = BandedOperator.from_stencil(
        N, N + 1, interior, -1,
        boundary_rows=[
            (0, _dense_row(N + 1, 0, MIMETIC_D_FIRST)),
            (N - 1, _dense_row(N + 1, N + 1 - 6, mirror(MIMETIC_D_FIRST))),
        ],
        scale=1.0 / h,
    )
    G = BandedOperator.from_stencil(
        N + 1, N + 2, interior, -1,
        boundary_rows=[
            (0, _dense_row(N + 2, 0, MIMETIC_G_FIRST)),
            (1, _dense_row(N + 2, 0, MIMETIC_G_SECOND)),
            (N - 1, _dense_row(N + 2, N + 2 - 5, mirror(MIMETIC_G_SECOND))),
            (N, _dense_row(N + 2, N + 2 - 6, mirror(MIMETIC_G_FIRST))),
        ],
        scale=1.0 / h,
    )
    return MimeticOperatorSet(N, h, D, G)


def cfd_differentiate(ops, M, axis="x", reduced=False):
    """Compact derivative of ``M`` along x (rows) or y (columns)."""
    M = np.asarray(M, dtype=np.float64)
    if axis == "x":
        if M.ndim != 2 or M.shape[1] != ops.N + 1:
            raise ShapeMismatch(f"x-derivative needs {ops.N + 1} columns, got shape {M.shape}")
        return ops.dx_reduced(M) if reduced else ops.dx_full(M)
    if axis == "y":
        if M.ndim != 2 or M.shape[0] != ops.N + 1:
            raise ShapeMismatch(f"y-derivative needs {ops.N + 1} rows, got shape {M.shape}")
        return ops.dy_reduced(M) if reduced else ops.dy_full(M)
    raise ValueError(f"axis must be 'x' or 'y', got {axis!r}")
