"""Nodal compact-difference scheme with Peaceman-Rachford ADI time stepping.

Stage 1 is implicit in x and couples interior pressure with the horizontal
velocity row by row; stage 2 is implicit in y and couples pressure with the
vertical velocity column by column. Each coupling is resolved by the
fixed-point loop in :mod:`adiwave.adi`, where every sweep is a batch of
independent tridiagonal solves against the cached factors of P or Pbar.
"""
import numpy as np

from .adi import PRESCRIBED, AdiConfig, AdiStepStats, check_finite, fixed_point, time_step_size
from .errors import ShapeMismatch
from .fields import GridSpec, MaterialField, Scheme, WaveState
from .linalg import (
    banded_times_dense,
    dense_times_banded_transpose,
    frobenius_norm,
    solve_batched,
)
from .manufactured import SampledCase
from .operators import build_cfd_operators

_IN = slice(1, -1)


def _stage_eps(cfg, U):
    return cfg.eps * frobenius_norm(U[_IN, _IN])


def adi_rows_cfd(U, V, A, B, ops, mat, cfg, dt, edges=None):
    """x-implicit fixed point.

    ``U`` is the full pressure matrix whose boundary columns already hold the
    intermediate Dirichlet data; ``V`` the full horizontal velocity. With
    ``edges=(left, right)`` the velocity on the x = 0 and x = 1 columns is
    held at those values instead of being taken from the boundary closure.
    Returns updated copies ``(U*, V*)`` plus the stage result.
    """
    U = np.array(U, dtype=np.float64)
    V = np.array(V, dtype=np.float64)
    half = 0.5 * dt
    u_in = U[_IN, _IN]
    v_red = np.ascontiguousarray(V[_IN, :])
    eps_abs = _stage_eps(cfg, U)

    def update_p(vel):
        rhs = A - half * mat.K * dense_times_banded_transpose(vel, ops.Qbar)
        return solve_batched(ops.Pbar.fact, rhs, "rows", out=rhs)

    def update_vel():
        rhs = B - half * mat.RV * dense_times_banded_transpose(U[_IN, :], ops.Q)
        out = solve_batched(ops.P.fact, rhs, "rows", out=rhs)
        if edges is not None:
            out[:, 0], out[:, -1] = edges
        return out

    if edges is not None:
        v_red[:, 0], v_red[:, -1] = edges
    res = fixed_point(u_in, v_red, update_p, update_vel, cfg, eps_abs)
    V[_IN, :] = v_red
    return U, V, res


def adi_columns_cfd(U, W, C, D, ops, mat, cfg, dt, edges=None):
    """y-implicit fixed point, the column-wise mirror of :func:`adi_rows_cfd`.

    ``U`` must carry the new-time Dirichlet data on its boundary rows;
    ``edges=(bottom, top)`` pins W on the y = 0 and y = 1 rows.
    """
    U = np.array(U, dtype=np.float64)
    W = np.array(W, dtype=np.float64)
    half = 0.5 * dt
    u_in = U[_IN, _IN]
    w_red = np.ascontiguousarray(W[:, _IN])
    eps_abs = _stage_eps(cfg, U)

    def update_p(vel):
        rhs = C - half * mat.K * banded_times_dense(ops.Qbar, vel)
        return solve_batched(ops.Pbar.fact, rhs, "columns", out=rhs)

    def update_vel():
        rhs = D - half * mat.RW * banded_times_dense(ops.Q, np.ascontiguousarray(U[:, _IN]))
        out = solve_batched(ops.P.fact, rhs, "columns", out=rhs)
        if edges is not None:
            out[0, :], out[-1, :] = edges
        return out

    if edges is not None:
        w_red[0, :], w_red[-1, :] = edges
    res = fixed_point(u_in, w_red, update_p, update_vel, cfg, eps_abs)
    W[:, _IN] = w_red
    return U, W, res


class CfdStepper:
    """Advance a nodal :class:`WaveState` one ADI step at a time."""

    scheme = Scheme.NODAL

    def __init__(self, N, case, cfg=None, mat=None, dt=None, ops=None):
        self.grid = GridSpec(N)
        self.case = case
        self.cfg = cfg or AdiConfig(cfl=0.91)
        self.ops = ops or build_cfd_operators(N)
        self.mat = mat or MaterialField.sample(self.grid, self.scheme, case.kappa, case.rho)
        self.sampled = SampledCase(case, self.grid, self.scheme)
        self.dt = dt if dt is not None else time_step_size(N, self.cfg.cfl, self.mat.c_max)

    def initial_state(self):
        return self.sampled.state(0.0)

    def step(self, state, dt=None):
        dt = self.dt if dt is None else dt
        ops, mat, cfg, ex = self.ops, self.mat, self.cfg, self.sampled
        _check_shapes(state, self.grid)
        half = 0.5 * dt
        t0, t1 = state.time, state.time + dt
        U, V, W = state.U, state.V, state.W
        stats = AdiStepStats()

        # stage 1: explicit in y, implicit in x
        wy = ops.dy_reduced(np.ascontiguousarray(W[:, _IN]))
        A = dense_times_banded_transpose(U[_IN, _IN] - half * (mat.K * wy - ex.forcing(t0)), ops.Pbar.op)
        B = dense_times_banded_transpose(np.ascontiguousarray(V[_IN, :]), ops.P.op)
        W_star = W.copy()
        W_star[:, _IN] -= half * mat.RW * ops.dy_full(np.ascontiguousarray(U[:, _IN]))

        pin = cfg.edges_prescribed(PRESCRIBED)
        v_edges = w_edges = None
        if pin:
            Vh, Wh = ex.V(t0 + half), ex.W(t0 + half)
            v_edges = (Vh[_IN, 0], Vh[_IN, -1])
            W_star[0, _IN], W_star[-1, _IN] = Wh[0, _IN], Wh[-1, _IN]

        U_start = U.copy()
        _set_ring(U_start, ex.intermediate_pressure(t0, dt, cfg.intermediate_bc))
        U_star, V_star, res1 = adi_rows_cfd(U_start, V, A, B, ops, mat, cfg, dt, v_edges)
        _record(stats, "rows", res1)

        # stage 2: explicit in x, implicit in y
        vx = ops.dx_reduced(np.ascontiguousarray(V_star[_IN, :]))
        C = banded_times_dense(ops.Pbar.op, U_star[_IN, _IN] - half * (mat.K * vx - ex.forcing(t1)))
        D = banded_times_dense(ops.P.op, np.ascontiguousarray(W_star[:, _IN]))
        V_new = V_star
        V_new[_IN, :] -= half * mat.RV * ops.dx_full(np.ascontiguousarray(U_star[_IN, :]))

        if pin:
            V1, W1 = ex.V(t1), ex.W(t1)
            V_new[_IN, 0], V_new[_IN, -1] = V1[_IN, 0], V1[_IN, -1]
            w_edges = (W1[0, _IN], W1[-1, _IN])

        _set_ring(U_star, ex.U(t1))
        U_new, W_new, res2 = adi_columns_cfd(U_star, W_star, C, D, ops, mat, cfg, dt, w_edges)
        _record(stats, "cols", res2)

        # velocity lines no update formula reaches
        V_new[0, :], V_new[-1, :] = ex.V(t1)[0, :], ex.V(t1)[-1, :]
        W_new[:, 0], W_new[:, -1] = ex.W(t1)[:, 0], ex.W(t1)[:, -1]
        check_finite(U_new, V_new, W_new)
        return WaveState(self.scheme, U_new, V_new, W_new, t1), stats


def _set_ring(U, values):
    U[0, :], U[-1, :] = values[0, :], values[-1, :]
    U[:, 0], U[:, -1] = values[:, 0], values[:, -1]


def _record(stats, which, res):
    setattr(stats, f"inner_iters_{which}", res.iters)
    setattr(stats, f"final_residual_{which}", res.residual)
    setattr(stats, f"converged_{which}", res.converged)
    setattr(stats, f"residuals_{which}", res.history)


def _check_shapes(state, grid):
    if state.scheme is not Scheme.NODAL:
        raise ShapeMismatch(f"nodal scheme got a {state.scheme.value} state")
    state.validate()
    if state.N != grid.N:
        raise ShapeMismatch(f"state has N={state.N}, stepper has N={grid.N}")


def cfd_time_step(state, ops, mat, cfg, case, dt=None):
    """One full ADI step of the nodal scheme; returns ``(new_state, stats)``."""
    stepper = CfdStepper(state.N, case, cfg=cfg, mat=mat, dt=dt, ops=ops)
    return stepper.step(state)
