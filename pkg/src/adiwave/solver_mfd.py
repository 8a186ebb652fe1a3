"""Staggered mimetic scheme with the same Peaceman-Rachford ADI stepping.

Differentiation is an explicit banded product with D (divergence) or G
(gradient), so the fixed-point sweeps need no linear solves.
"""
import numpy as np

from .adi import COMPUTED, AdiConfig, AdiStepStats, check_finite, fixed_point, time_step_size
from .errors import ShapeMismatch
from .fields import GridSpec, MaterialField, Scheme, WaveState
from .linalg import banded_times_dense, dense_times_banded_transpose, frobenius_norm
from .manufactured import SampledCase
from .operators import build_mimetic_operators
from .solver_cfd import _record, _set_ring

_IN = slice(1, -1)


def adi_rows_mfd(U, V, A, B, ops, mat, cfg, dt, edges=None):
    """x-implicit fixed point on the staggered grid; see :func:`adi_rows_cfd`."""
    U = np.array(U, dtype=np.float64)
    V = np.array(V, dtype=np.float64)
    half = 0.5 * dt
    u_in = U[_IN, _IN]
    v_red = np.ascontiguousarray(V[_IN, :])
    eps_abs = cfg.eps * frobenius_norm(u_in)

    def update_p(vel):
        return A - half * mat.K * dense_times_banded_transpose(vel, ops.D)

    def update_vel():
        out = B - half * mat.RV * dense_times_banded_transpose(U[_IN, :], ops.G)
        if edges is not None:
            out[:, 0], out[:, -1] = edges
        return out

    if edges is not None:
        v_red[:, 0], v_red[:, -1] = edges
    res = fixed_point(u_in, v_red, update_p, update_vel, cfg, eps_abs)
    V[_IN, :] = v_red
    return U, V, res


def adi_columns_mfd(U, W, C, D, ops, mat, cfg, dt, edges=None):
    U = np.array(U, dtype=np.float64)
    W = np.array(W, dtype=np.float64)
    half = 0.5 * dt
    u_in = U[_IN, _IN]
    w_red = np.ascontiguousarray(W[:, _IN])
    eps_abs = cfg.eps * frobenius_norm(u_in)

    def update_p(vel):
        return C - half * mat.K * banded_times_dense(ops.D, vel)

    def update_vel():
        out = D - half * mat.RW * banded_times_dense(ops.G, np.ascontiguousarray(U[:, _IN]))
        if edges is not None:
            out[0, :], out[-1, :] = edges
        return out

    if edges is not None:
        w_red[0, :], w_red[-1, :] = edges
    res = fixed_point(u_in, w_red, update_p, update_vel, cfg, eps_abs)
    W[:, _IN] = w_red
    return U, W, res


class MfdStepper:
    """Advance a staggered :class:`WaveState` one ADI step at a time."""

    scheme = Scheme.STAGGERED

    def __init__(self, N, case, cfg=None, mat=None, dt=None, ops=None):
        self.grid = GridSpec(N)
        self.case = case
        self.cfg = cfg or AdiConfig(cfl=0.81)
        self.ops = ops or build_mimetic_operators(N)
        self.mat = mat or MaterialField.sample(self.grid, self.scheme, case.kappa, case.rho)
        self.sampled = SampledCase(case, self.grid, self.scheme)
        self.dt = dt if dt is not None else time_step_size(N, self.cfg.cfl, self.mat.c_max)

    def initial_state(self):
        return self.sampled.state(0.0)

    def step(self, state, dt=None):
        dt = self.dt if dt is None else dt
        ops, mat, cfg, ex = self.ops, self.mat, self.cfg, self.sampled
        if state.scheme is not Scheme.STAGGERED:
            raise ShapeMismatch(f"staggered scheme got a {state.scheme.value} state")
        state.validate()
        if state.N != self.grid.N:
            raise ShapeMismatch(f"state has N={state.N}, stepper has N={self.grid.N}")
        half = 0.5 * dt
        t0, t1 = state.time, state.time + dt
        U, V, W = state.U, state.V, state.W
        stats = AdiStepStats()

        wy = banded_times_dense(ops.D, np.ascontiguousarray(W[:, _IN]))
        A = U[_IN, _IN] - half * (mat.K * wy - ex.forcing(t0))
        B = np.ascontiguousarray(V[_IN, :])
        W_star = W.copy()
        W_star[:, _IN] -= half * mat.RW * banded_times_dense(ops.G, np.ascontiguousarray(U[:, _IN]))

        pin = cfg.edges_prescribed(COMPUTED)
        v_edges = w_edges = None
        if pin:
            Vh, Wh = ex.V(t0 + half), ex.W(t0 + half)
            v_edges = (Vh[_IN, 0], Vh[_IN, -1])
            W_star[0, _IN], W_star[-1, _IN] = Wh[0, _IN], Wh[-1, _IN]

        U_start = U.copy()
        _set_ring(U_start, ex.intermediate_pressure(t0, dt, cfg.intermediate_bc))
        U_star, V_star, res1 = adi_rows_mfd(U_start, V, A, B, ops, mat, cfg, dt, v_edges)
        _record(stats, "rows", res1)

        vx = dense_times_banded_transpose(np.ascontiguousarray(V_star[_IN, :]), ops.D)
        C = U_star[_IN, _IN] - half * (mat.K * vx - ex.forcing(t1))
        D = np.ascontiguousarray(W_star[:, _IN])
        V_new = V_star
        V_new[_IN, :] -= half * mat.RV * dense_times_banded_transpose(U_star[_IN, :], ops.G)

        if pin:
            V1, W1 = ex.V(t1), ex.W(t1)
            V_new[_IN, 0], V_new[_IN, -1] = V1[_IN, 0], V1[_IN, -1]
            w_edges = (W1[0, _IN], W1[-1, _IN])

        _set_ring(U_star, ex.U(t1))
        U_new, W_new, res2 = adi_columns_mfd(U_star, W_star, C, D, ops, mat, cfg, dt, w_edges)
        _record(stats, "cols", res2)

        V_new[0, :], V_new[-1, :] = ex.V(t1)[0, :], ex.V(t1)[-1, :]
        W_new[:, 0], W_new[:, -1] = ex.W(t1)[:, 0], ex.W(t1)[:, -1]
        check_finite(U_new, V_new, W_new)
        return WaveState(self.scheme, U_new, V_new, W_new, t1), stats


def mfd_time_step(state, ops, mat, cfg, case, dt=None):
    """One full ADI step of the staggered scheme; returns ``(new_state, stats)``."""
    stepper = MfdStepper(state.N, case, cfg=cfg, mat=mat, dt=dt, ops=ops)
    return stepper.step(state)
