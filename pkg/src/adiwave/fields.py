"""Grid geometry, wave-field layouts and material sampling.

Layouts (rows index y, columns index x):

* nodal: U, V, W all ``(N+1, N+1)`` on nodes ``x_i = i h``.
* staggered: U ``(N+2, N+2)`` on centers-plus-edges in both directions,
  V ``(N+2, N+1)`` with x on nodes, W ``(N+1, N+2)`` with y on nodes.
"""
from dataclasses import dataclass, field
from enum import Enum
from pathlib import Path

import numpy as np

from .errors import ShapeMismatch, TooSmallGrid
from .operators import MIN_N


class Scheme(str, Enum):
    NODAL = "nodal"
    STAGGERED = "staggered"

    @classmethod
    def parse(cls, value):
        if isinstance(value, cls):
            return value
        aliases = {"cfd": cls.NODAL, "mfd": cls.STAGGERED}
        v = str(value).lower()
        if v in aliases:
            return aliases[v]
        return cls(v)

    @property
    def label(self):
        """Short name used on the command line and in CSV output."""
        return "cfd" if self is Scheme.NODAL else "mfd"


@dataclass(frozen=True)
class GridSpec:
    N: int

    def __post_init__(self):
        if int(self.N) != self.N or self.N < MIN_N:
            raise TooSmallGrid(f"N must be an integer >= {MIN_N}, got {self.N}")

    @property
    def h(self):
        return 1.0 / self.N

    @property
    def nodes(self):
        return np.arange(self.N + 1) / self.N

    @property
    def centers_and_edges(self):
        return np.concatenate(([0.0], (np.arange(self.N) + 0.5) / self.N, [1.0]))

    def axes(self, scheme, name):
        """(y, x) coordinate vectors of field ``name`` in ``scheme``."""
        scheme = Scheme.parse(scheme)
        n, cb = self.nodes, self.centers_and_edges
        if scheme is Scheme.NODAL:
            return n, n
        return {"U": (cb, cb), "V": (cb, n), "W": (n, cb)}[name]

    def shape(self, scheme, name):
        y, x = self.axes(scheme, name)
        return (y.size, x.size)

    def mesh(self, scheme, name):
        """``(X, Y)`` coordinate matrices shaped like field ``name``."""
        y, x = self.axes(scheme, name)
        X, Y = np.meshgrid(x, y)
        return X, Y


@dataclass
class WaveState:
    scheme: Scheme
    U: np.ndarray
    V: np.ndarray
    W: np.ndarray
    time: float = 0.0

    @property
    def N(self):
        return self.U.shape[0] - (1 if self.scheme is Scheme.NODAL else 2)

    @property
    def grid(self):
        return GridSpec(self.N)

    def validate(self):
        grid = self.grid
        for name in "UVW":
            arr = getattr(self, name)
            expected = grid.shape(self.scheme, name)
            if arr.shape != expected:
                raise ShapeMismatch(f"{self.scheme.value} {name} has shape {arr.shape}, expected {expected}")
        return self

    def copy(self):
        return WaveState(self.scheme, self.U.copy(), self.V.copy(), self.W.copy(), self.time)

    def is_finite(self):
        return all(np.all(np.isfinite(a)) for a in (self.U, self.V, self.W))


@dataclass
class MaterialField:
    """kappa at interior pressure points, 1/rho at reduced V and W points."""

    K: np.ndarray
    RV: np.ndarray
    RW: np.ndarray
    c_max: float = field(default=None)

    def __post_init__(self):
        for name in ("K", "RV", "RW"):
            arr = np.ascontiguousarray(getattr(self, name), dtype=np.float64)
            if not (np.all(np.isfinite(arr)) and np.all(arr > 0)):
                raise ValueError(f"material field {name} must be positive and finite")
            setattr(self, name, arr)
        if self.c_max is None:
            self.c_max = float(np.sqrt(self.K.max() * max(self.RV.max(), self.RW.max())))

    @classmethod
    def sample(cls, grid, scheme, kappa=1.0, rho=1.0):
        """Sample constant or callable ``kappa(x, y)`` / ``rho(x, y)``."""

        def values(fn, name, rows, cols):
            X, Y = grid.mesh(scheme, name)
            X, Y = X[rows, cols], Y[rows, cols]
            out = fn(X, Y) if callable(fn) else np.full(X.shape, float(fn))
            return np.broadcast_to(np.asarray(out, dtype=np.float64), X.shape)

        inner = slice(1, -1)
        full = slice(None)
        K = values(kappa, "U", inner, inner)
        RV = 1.0 / values(rho, "V", inner, full)
        RW = 1.0 / values(rho, "W", full, inner)
        c_max = None
        if not callable(kappa) and not callable(rho) and float(kappa) > 0 and float(rho) > 0:
            c_max = float(np.sqrt(float(kappa) / float(rho)))
        return cls(K, RV, RW, c_max)


def _need(m, rows, cols):
    if m.ndim != 2 or m.shape[0] < rows or m.shape[1] < cols:
        raise TooSmallGrid(f"matrix of shape {m.shape} is too small for this view")


def interior_view(m):
    """All but the first/last row and column; writes go through to ``m``."""
    _need(m, 3, 3)
    return m[1:-1, 1:-1]


def reduced_rows(m):
    _need(m, 3, 1)
    return m[1:-1, :]


def reduced_cols(m):
    _need(m, 1, 3)
    return m[:, 1:-1]


def allocate_state(scheme, N):
    scheme = Scheme.parse(scheme)
    grid = GridSpec(N)
    U, V, W = (np.zeros(grid.shape(scheme, name)) for name in "UVW")
    return WaveState(scheme, U, V, W, 0.0)


SNAPSHOT_MAGIC = b"ADIWAVE1"


def write_snapshot(state, path, fmt=None):
    """Dump ``state.U`` for debugging.

    ``.csv``: ``# scheme=<s> N=<n> time=<t>`` header line, then one matrix row
    per line. Anything else: binary, ``ADIWAVE1`` magic, a 64-byte ASCII
    header ``scheme N time`` padded with spaces, then ``rows, cols`` as
    little-endian int64 and the row-major little-endian float64 data.
    """
    path = Path(path)
    fmt = fmt or ("csv" if path.suffix.lower() == ".csv" else "bin")
    if fmt == "csv":
        header = f"scheme={state.scheme.value} N={state.N} time={state.time!r}"
        np.savetxt(path, state.U, delimiter=",", header=header, fmt="%.17g")
        return path
    head = f"{state.scheme.value} {state.N} {state.time!r}".encode().ljust(64)
    with open(path, "wb") as fh:
        fh.write(SNAPSHOT_MAGIC)
        fh.write(head[:64])
        fh.write(np.asarray(state.U.shape, dtype="<i8").tobytes())
        fh.write(np.ascontiguousarray(state.U, dtype="<f8").tobytes())
    return path


def read_snapshot(path):
    """Inverse of :func:`write_snapshot`; returns ``(scheme, N, time, U)``."""
    path = Path(path)
    with open(path, "rb") as fh:
        magic = fh.read(len(SNAPSHOT_MAGIC))
        if magic == SNAPSHOT_MAGIC:
            scheme, n, t = fh.read(64).decode().split()
            rows, cols = np.frombuffer(fh.read(16), dtype="<i8")
            U = np.frombuffer(fh.read(), dtype="<f8").reshape(rows, cols).copy()
            return Scheme(scheme), int(n), float(t), U
    with open(path) as fh:
        header = fh.readline().lstrip("#").split()
    meta = dict(item.split("=", 1) for item in header)
    U = np.loadtxt(path, delimiter=",", ndmin=2)
    return Scheme(meta["scheme"]), int(meta["N"]), float(meta["time"]), U
