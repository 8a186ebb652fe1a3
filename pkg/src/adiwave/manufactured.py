"""Time-harmonic exact solution of the velocity-pressure acoustic system.

Pressure is ``u = S(x, y) cos(w t)`` with

    S = gamma (x^k - (1-x)^k + y^k - (1-y)^k) + sin(2 pi x / lam) sin(2 pi y / lam)

The velocities follow from ``rho dv/dt = -grad u`` with zero initial value,
and the forcing ``f`` is whatever makes ``du/dt = -kappa div v + f`` hold.
"""
import math
from dataclasses import dataclass

import numpy as np

from .fields import Scheme, WaveState


@dataclass(frozen=True)
class ManufacturedCase:
    gamma: float = 0.0
    k: int = 1
    lam: float = 0.25
    period: float = 1.0 / math.sqrt(2.0)
    kappa: float = 1.0
    rho: float = 1.0

    def __post_init__(self):
        if int(self.k) != self.k or self.k < 1:
            raise ValueError(f"k must be a positive integer, got {self.k}")
        for name in ("lam", "period", "kappa", "rho"):
            if not getattr(self, name) > 0:
                raise ValueError(f"{name} must be positive")

    @classmethod
    def standard(cls, gamma_k=0):
        """The three test problems: gamma = k = 0 (pure sine), 2 or 9."""
        if gamma_k == 0:
            return cls(gamma=0.0, k=1)
        return cls(gamma=float(gamma_k), k=int(gamma_k))

    @property
    def omega(self):
        return 2.0 * math.pi / self.period

    @property
    def c(self):
        return math.sqrt(self.kappa / self.rho)

    # spatial factor and its derivatives

    def _poly(self, s):
        return s**self.k - (1.0 - s) ** self.k

    def _poly_d1(self, s):
        k = self.k
        return k * (s ** (k - 1) + (1.0 - s) ** (k - 1))

    def _poly_d2(self, s):
        k = self.k
        if k < 2:
            return np.zeros_like(np.asarray(s, dtype=float))
        return k * (k - 1) * (s ** (k - 2) - (1.0 - s) ** (k - 2))

    def spatial(self, x, y):
        a = 2.0 * np.pi / self.lam
        return self.gamma * (self._poly(x) + self._poly(y)) + np.sin(a * x) * np.sin(a * y)

    def spatial_dx(self, x, y):
        a = 2.0 * np.pi / self.lam
        return self.gamma * self._poly_d1(x) + a * np.cos(a * x) * np.sin(a * y)

    def spatial_dy(self, x, y):
        a = 2.0 * np.pi / self.lam
        return self.gamma * self._poly_d1(y) + a * np.sin(a * x) * np.cos(a * y)

    def spatial_dyy(self, x, y):
        a = 2.0 * np.pi / self.lam
        return self.gamma * self._poly_d2(y) - a * a * np.sin(a * x) * np.sin(a * y)

    def spatial_laplacian(self, x, y):
        a = 2.0 * np.pi / self.lam
        return (self.gamma * (self._poly_d2(x) + self._poly_d2(y))
                - 2.0 * a * a * np.sin(a * x) * np.sin(a * y))

    # fields

    def u(self, x, y, t):
        return self.spatial(x, y) * np.cos(self.omega * t)

    def v(self, x, y, t):
        return -self.spatial_dx(x, y) * np.sin(self.omega * t) / (self.rho * self.omega)

    def w(self, x, y, t):
        return -self.spatial_dy(x, y) * np.sin(self.omega * t) / (self.rho * self.omega)

    def f(self, x, y, t):
        w = self.omega
        return -np.sin(w * t) * (w * self.spatial(x, y)
                                 + self.kappa / (self.rho * w) * self.spatial_laplacian(x, y))


def eval_u(case, x, y, t):
    return case.u(x, y, t)


def eval_v(case, x, y, t):
    return case.v(x, y, t)


def eval_w(case, x, y, t):
    return case.w(x, y, t)


def eval_f(case, x, y, t):
    return case.f(x, y, t)


class SampledCase:
    """A case bound to one grid layout, with coordinate meshes cached."""

    def __init__(self, case, grid, scheme):
        self.case = case
        self.grid = grid
        self.scheme = Scheme.parse(scheme)
        self.meshes = {name: grid.mesh(self.scheme, name) for name in "UVW"}
        X, Y = self.meshes["U"]
        self._interior = (np.ascontiguousarray(X[1:-1, 1:-1]), np.ascontiguousarray(Y[1:-1, 1:-1]))
        self._spatial_u = case.spatial(X, Y)
        # the pressure forcing is separable in time: f = -sin(wt) * shape
        w = case.omega
        Xi, Yi = self._interior
        self._forcing_shape = (w * case.spatial(Xi, Yi)
                               + case.kappa / (case.rho * w) * case.spatial_laplacian(Xi, Yi))
        Xv, Yv = self.meshes["V"]
        Xw, Yw = self.meshes["W"]
        self._v_shape = -case.spatial_dx(Xv, Yv) / (case.rho * w)
        self._w_shape = -case.spatial_dy(Xw, Yw) / (case.rho * w)

    def U(self, t):
        return self._spatial_u * np.cos(self.case.omega * t)

    def V(self, t):
        return self._v_shape * np.sin(self.case.omega * t)

    def W(self, t):
        return self._w_shape * np.sin(self.case.omega * t)

    def forcing(self, t):
        """Source at interior pressure points."""
        return -np.sin(self.case.omega * t) * self._forcing_shape

    def intermediate_pressure(self, t, dt, mode="midpoint"):
        """Pressure for the boundary ring of the half-step state between ``t``
        and ``t + dt``.

        ``midpoint`` samples the exact solution at ``t + dt/2``. ``consistent``
        uses what the two split stages imply when they are added together:
        ``(U^m + U^{m+1})/2 + (dt/4) (A2 U^m - A2 U^{m+1} + F^m - F^{m+1})``
        where ``A2`` is the y-split operator (``-kappa dw/dy`` on pressure).
        """
        if mode == "midpoint":
            return self.U(t + 0.5 * dt)
        w = self.case.omega
        t1 = t + dt
        X, Y = self.meshes["U"]
        if not hasattr(self, "_dyy_u"):
            c = self.case
            self._dyy_u = c.spatial_dyy(X, Y)
            self._f_u = w * c.spatial(X, Y) + c.kappa / (c.rho * w) * c.spatial_laplacian(X, Y)
        c = self.case
        # -kappa * dw/dy with w = -S_y sin(wt) / (rho w)
        a2 = lambda s: c.kappa * self._dyy_u * np.sin(w * s) / (c.rho * w)
        f = lambda s: -np.sin(w * s) * self._f_u
        return 0.5 * (self.U(t) + self.U(t1)) + 0.25 * dt * (a2(t) - a2(t1) + f(t) - f(t1))

    def state(self, t):
        return WaveState(self.scheme, self.U(t), self.V(t), self.W(t), t)


def sample_initial_state(case, grid, scheme):
    return SampledCase(case, grid, scheme).state(0.0)


def sample_boundary_u(case, grid, scheme, t):
    """Pressure on the boundary ring, as a full matrix with zeros inside."""
    U = SampledCase(case, grid, scheme).U(t)
    U[1:-1, 1:-1] = 0.0
    return U
