"""Banded operators, unpivoted tridiagonal LU and the batched kernels built on them.

Dense matrices are plain C-contiguous ``float64`` ndarrays; rows index y and
columns index x throughout the package.

Each kernel exists twice: a numba version (``_nb_*``) and a numpy version
(``_np_*``). Both work on a half-open block ``[lo, hi)`` of the independent
axis so that :func:`adiwave.parallel.run_chunks` can spread them over workers.
"""
from dataclasses import dataclass, field

import numpy as np

from . import _accel
from ._accel import njit
from .errors import ShapeMismatch, ZeroPivot
from .parallel import run_chunks

__all__ = [
    "BandedOperator",
    "TridiagonalFactorization",
    "lu_factor_tridiagonal",
    "solve_batched",
    "banded_times_dense",
    "dense_times_banded_transpose",
    "frobenius_norm",
]

PIVOT_RTOL = 1e-14


# ---------------------------------------------------------------------------
# containers
# ---------------------------------------------------------------------------


@dataclass(frozen=True, eq=False)
class BandedOperator:
    """A finite-difference matrix: a diagonal-ordered band plus dense boundary rows.

    ``band[d, i]`` holds entry ``(i, i - lower_bw + d)``. Rows listed in
    ``boundary_rows`` are stored only there; their band column is zero.
    """

    rows: int
    cols: int
    lower_bw: int
    upper_bw: int
    band: np.ndarray
    boundary_rows: tuple = ()
    # packed per-row form used by the kernels: row i touches
    # columns start[i] .. start[i] + width - 1 with weights coef[i]
    start: np.ndarray = field(init=False, repr=False)
    coef: np.ndarray = field(init=False, repr=False)

    def __post_init__(self):
        band = np.ascontiguousarray(self.band, dtype=np.float64)
        if band.shape != (self.lower_bw + self.upper_bw + 1, self.rows):
            raise ShapeMismatch(
                f"band shape {band.shape} does not match "
                f"({self.lower_bw + self.upper_bw + 1}, {self.rows})"
            )
        if not np.all(np.isfinite(band)):
            raise ValueError("band coefficients must be finite")
        overrides = {}
        for idx, row in self.boundary_rows:
            row = np.asarray(row, dtype=np.float64)
            if not 0 <= idx < self.rows:
                raise ValueError(f"boundary row index {idx} outside [0, {self.rows})")
            if row.shape != (self.cols,):
                raise ShapeMismatch(f"boundary row {idx} has length {row.shape}, expected {self.cols}")
            if not np.all(np.isfinite(row)):
                raise ValueError(f"boundary row {idx} has non-finite coefficients")
            if idx in overrides:
                raise ValueError(f"boundary row {idx} given twice")
            overrides[idx] = row
        band = band.copy()
        band[:, list(overrides)] = 0.0
        object.__setattr__(self, "band", band)
        object.__setattr__(self, "boundary_rows", tuple(sorted(overrides.items())))

        spans = []
        for i in range(self.rows):
            if i in overrides:
                nz = np.flatnonzero(overrides[i])
                lo, hi = (int(nz[0]), int(nz[-1]) + 1) if nz.size else (0, 1)
                spans.append((lo, overrides[i][lo:hi]))
            else:
                lo = i - self.lower_bw
                vals = band[:, i].copy()
                for d in range(vals.size):
                    j = lo + d
                    if (j < 0 or j >= self.cols) and vals[d] != 0.0:
                        raise ValueError(f"band entry ({i}, {j}) falls outside the matrix")
                spans.append((lo, vals))
        width = max(len(v) for _, v in spans)
        start = np.empty(self.rows, dtype=np.int64)
        coef = np.zeros((self.rows, width))
        for i, (lo, vals) in enumerate(spans):
            # shift the window inside [0, cols - width] and pad with zeros
            s = min(max(lo, 0), max(self.cols - width, 0))
            for d, c in enumerate(vals):
                if c != 0.0:
                    coef[i, lo + d - s] = c
            start[i] = s
        object.__setattr__(self, "start", start)
        object.__setattr__(self, "coef", coef)

    @classmethod
    def from_stencil(cls, rows, cols, stencil, offset, boundary_rows=(), scale=1.0):
        """Build an operator whose interior row ``i`` applies ``stencil`` at
        columns ``i + offset, i + offset + 1, ...``."""
        stencil = np.asarray(stencil, dtype=np.float64)
        lower = max(-offset, 0)
        upper = max(offset + stencil.size - 1, 0)
        band = np.zeros((lower + upper + 1, rows))
        for d, c in enumerate(stencil):
            band[offset + d + lower, :] = c
        # clip the band at the matrix edges; boundary rows cover those anyway
        for i in range(rows):
            for d in range(band.shape[0]):
                j = i - lower + d
                if j < 0 or j >= cols:
                    band[d, i] = 0.0
        band *= scale
        overrides = tuple((i, np.asarray(r, dtype=np.float64) * scale) for i, r in boundary_rows)
        return cls(rows, cols, lower, upper, band, overrides)

    @property
    def shape(self):
        return (self.rows, self.cols)

    @property
    def width(self):
        return self.coef.shape[1]

    def to_dense(self):
        out = np.zeros((self.rows, self.cols))
        for i in range(self.rows):
            s = self.start[i]
            w = min(self.width, self.cols - s)
            out[i, s:s + w] = self.coef[i, :w]
        return out

    def row(self, i):
        return self.to_dense()[i]


@dataclass(frozen=True, eq=False)
class TridiagonalFactorization:
    """Doolittle LU factors of a tridiagonal matrix, no pivoting.

    ``L`` is unit lower bidiagonal with sub-diagonal ``lower``; ``U`` has the
    pivots on its diagonal and the original super-diagonal above it.
    """

    n: int
    lower: np.ndarray
    pivots: np.ndarray
    upper: np.ndarray
    inv_pivots: np.ndarray = field(init=False, repr=False)

    def __post_init__(self):
        object.__setattr__(self, "inv_pivots", 1.0 / self.pivots)

    def to_dense(self):
        """Multiply the factors back together."""
        L = np.eye(self.n) + np.diag(self.lower, -1)
        U = np.diag(self.pivots) + np.diag(self.upper, 1)
        return L @ U


def lu_factor_tridiagonal(diag_lower, diag_main, diag_upper):
    """Factor the tridiagonal matrix with the given diagonals without pivoting.

    Raises :class:`ZeroPivot` if any pivot is below ``1e-14`` times the
    matrix max-norm.
    """
    a = np.asarray(diag_lower, dtype=np.float64)
    b = np.asarray(diag_main, dtype=np.float64)
    c = np.asarray(diag_upper, dtype=np.float64)
    n = b.size
    if n < 2 or a.size != n - 1 or c.size != n - 1:
        raise ShapeMismatch(f"need n >= 2 and off-diagonals of length n-1, got {a.size}, {n}, {c.size}")
    scale = max(np.abs(a).max(), np.abs(b).max(), np.abs(c).max())
    tol = PIVOT_RTOL * scale
    lower = np.empty(n - 1)
    pivots = np.empty(n)
    pivots[0] = b[0]
    for i in range(1, n):
        if abs(pivots[i - 1]) < tol or pivots[i - 1] == 0.0:
            raise ZeroPivot(f"pivot {i - 1} is {pivots[i - 1]!r}")
        lower[i - 1] = a[i - 1] / pivots[i - 1]
        pivots[i] = b[i] - lower[i - 1] * c[i - 1]
    if abs(pivots[-1]) < tol or pivots[-1] == 0.0:
        raise ZeroPivot(f"pivot {n - 1} is {pivots[-1]!r}")
    return TridiagonalFactorization(n, lower, pivots, c.copy())


# ---------------------------------------------------------------------------
# kernels
# ---------------------------------------------------------------------------


@njit(cache=True, nogil=True)
def _nb_tri_rows(lower, upper, inv_piv, rhs, out, lo, hi):
    n = inv_piv.size
    for r in range(lo, hi):
        y = out[r]
        b = rhs[r]
        y[0] = b[0]
        for i in range(1, n):
            y[i] = b[i] - lower[i - 1] * y[i - 1]
        y[n - 1] = y[n - 1] * inv_piv[n - 1]
        for i in range(n - 2, -1, -1):
            y[i] = (y[i] - upper[i] * y[i + 1]) * inv_piv[i]


@njit(cache=True, nogil=True)
def _nb_tri_cols(lower, upper, inv_piv, rhs, out, lo, hi):
    n = inv_piv.size
    for j in range(lo, hi):
        out[0, j] = rhs[0, j]
    for i in range(1, n):
        li = lower[i - 1]
        for j in range(lo, hi):
            out[i, j] = rhs[i, j] - li * out[i - 1, j]
    d = inv_piv[n - 1]
    for j in range(lo, hi):
        out[n - 1, j] *= d
    for i in range(n - 2, -1, -1):
        ui = upper[i]
        d = inv_piv[i]
        for j in range(lo, hi):
            out[i, j] = (out[i, j] - ui * out[i + 1, j]) * d


@njit(cache=True, nogil=True)
def _nb_band_left(start, coef, m, out, lo, hi):
    # out[i, :] = sum_w coef[i, w] * m[start[i] + w, :]
    width = coef.shape[1]
    ncol = m.shape[1]
    nrow_m = m.shape[0]
    for i in range(lo, hi):
        s = start[i]
        for j in range(ncol):
            out[i, j] = 0.0
        for w in range(width):
            c = coef[i, w]
            if c != 0.0 and s + w < nrow_m:
                src = m[s + w]
                for j in range(ncol):
                    out[i, j] += c * src[j]


@njit(cache=True, nogil=True)
def _nb_band_right(start, coef, m, out, lo, hi):
    # out[r, i] = sum_w coef[i, w] * m[r, start[i] + w]
    width = coef.shape[1]
    nout = coef.shape[0]
    ncol_m = m.shape[1]
    for r in range(lo, hi):
        src = m[r]
        dst = out[r]
        for i in range(nout):
            s = start[i]
            acc = 0.0
            for w in range(width):
                if s + w < ncol_m:
                    acc += coef[i, w] * src[s + w]
            dst[i] = acc


@njit(cache=True, nogil=True)
def _nb_row_sumsq(m, out, lo, hi):
    for r in range(lo, hi):
        acc = 0.0
        row = m[r]
        for j in range(row.size):
            acc += row[j] * row[j]
        out[r] = acc


def _np_tri_rows(lower, upper, inv_piv, rhs, out, lo, hi):
    n = inv_piv.size
    y = out[lo:hi]
    b = rhs[lo:hi]
    y[:, 0] = b[:, 0]
    for i in range(1, n):
        y[:, i] = b[:, i] - lower[i - 1] * y[:, i - 1]
    y[:, n - 1] *= inv_piv[n - 1]
    for i in range(n - 2, -1, -1):
        y[:, i] = (y[:, i] - upper[i] * y[:, i + 1]) * inv_piv[i]


def _np_tri_cols(lower, upper, inv_piv, rhs, out, lo, hi):
    n = inv_piv.size
    y = out[:, lo:hi]
    b = rhs[:, lo:hi]
    y[0] = b[0]
    for i in range(1, n):
        y[i] = b[i] - lower[i - 1] * y[i - 1]
    y[n - 1] *= inv_piv[n - 1]
    for i in range(n - 2, -1, -1):
        y[i] = (y[i] - upper[i] * y[i + 1]) * inv_piv[i]


def _np_band_left(start, coef, m, out, lo, hi):
    idx = start[lo:hi]
    c = coef[lo:hi]
    last = m.shape[0] - 1
    acc = np.zeros((hi - lo, m.shape[1]))
    for w in range(coef.shape[1]):
        acc += c[:, w, None] * m[np.minimum(idx + w, last)]
    out[lo:hi] = acc


def _np_band_right(start, coef, m, out, lo, hi):
    last = m.shape[1] - 1
    block = m[lo:hi]
    acc = np.zeros((hi - lo, coef.shape[0]))
    for w in range(coef.shape[1]):
        acc += block[:, np.minimum(start + w, last)] * coef[:, w]
    out[lo:hi] = acc


def _np_row_sumsq(m, out, lo, hi):
    block = m[lo:hi]
    out[lo:hi] = np.einsum("ij,ij->i", block, block)


if _accel.USE_NUMBA:
    _tri_rows, _tri_cols = _nb_tri_rows, _nb_tri_cols
    _band_left, _band_right = _nb_band_left, _nb_band_right
    _row_sumsq = _nb_row_sumsq
else:
    _tri_rows, _tri_cols = _np_tri_rows, _np_tri_cols
    _band_left, _band_right = _np_band_left, _np_band_right
    _row_sumsq = _np_row_sumsq


def _as_matrix(m, name="matrix"):
    m = np.asarray(m, dtype=np.float64)
    if m.ndim != 2:
        raise ShapeMismatch(f"{name} must be 2-D, got shape {m.shape}")
    if not m.flags.c_contiguous:
        m = np.ascontiguousarray(m)
    return m


def _output(out, shape):
    if out is None:
        return np.empty(shape)
    if out.shape != shape or out.dtype != np.float64 or not out.flags.c_contiguous:
        raise ShapeMismatch(f"out must be a C-contiguous float64 array of shape {shape}")
    return out


# ---------------------------------------------------------------------------
# public operations
# ---------------------------------------------------------------------------


def solve_batched(fact, rhs, orientation="columns", out=None):
    """Solve many tridiagonal systems sharing one factorization.

    ``orientation="columns"`` solves ``T @ X = rhs`` (one system per column);
    ``orientation="rows"`` solves ``X @ T.T = rhs`` (one system per row).
    ``out`` may alias ``rhs``.
    """
    rhs = _as_matrix(rhs, "rhs")
    args = (fact.lower, fact.upper, fact.inv_pivots)
    if orientation == "columns":
        if rhs.shape[0] != fact.n:
            raise ShapeMismatch(f"rhs has {rhs.shape[0]} rows, factorization is {fact.n}x{fact.n}")
        out = _output(out, rhs.shape)
        run_chunks(lambda lo, hi: _tri_cols(*args, rhs, out, lo, hi), rhs.shape[1])
    elif orientation == "rows":
        if rhs.shape[1] != fact.n:
            raise ShapeMismatch(f"rhs has {rhs.shape[1]} columns, factorization is {fact.n}x{fact.n}")
        out = _output(out, rhs.shape)
        run_chunks(lambda lo, hi: _tri_rows(*args, rhs, out, lo, hi), rhs.shape[0])
    else:
        raise ValueError(f"orientation must be 'columns' or 'rows', got {orientation!r}")
    return out


def banded_times_dense(op, m, out=None):
    """``op @ m``; output rows are independent."""
    m = _as_matrix(m)
    if op.cols != m.shape[0]:
        raise ShapeMismatch(f"operator is {op.rows}x{op.cols}, matrix has {m.shape[0]} rows")
    out = _output(out, (op.rows, m.shape[1]))
    run_chunks(lambda lo, hi: _band_left(op.start, op.coef, m, out, lo, hi), op.rows)
    return out


def dense_times_banded_transpose(m, op, out=None):
    """``m @ op.T``; output rows are independent."""
    m = _as_matrix(m)
    if m.shape[1] != op.cols:
        raise ShapeMismatch(f"matrix has {m.shape[1]} columns, operator is {op.rows}x{op.cols}")
    out = _output(out, (m.shape[0], op.rows))
    run_chunks(lambda lo, hi: _band_right(op.start, op.coef, m, out, lo, hi), m.shape[0])
    return out


def frobenius_norm(m):
    """Frobenius norm with per-row partial sums combined in row order."""
    m = np.asarray(m, dtype=np.float64)
    if m.ndim == 1:
        m = m[None, :]
    m = _as_matrix(m)
    if m.size == 0:
        return 0.0
    partial = np.empty(m.shape[0])
    run_chunks(lambda lo, hi: _row_sumsq(m, partial, lo, hi), m.shape[0])
    total = 0.0
    for p in partial:
        total += p
    return float(np.sqrt(total))
