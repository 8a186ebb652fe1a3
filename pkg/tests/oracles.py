"""Independent reference implementations used by the tests.

Operators are typed in again from the coefficient tables and assembled as
dense matrices; ADI stages are solved exactly with dense linear algebra
instead of the package's banded kernels and fixed-point loop.
"""
from fractions import Fraction as F

import numpy as np

# ---------------------------------------------------------------- operators

P_FIRST = [6, 18]
Q_FIRST = [-17, 9, 9, -1]
PBAR_FIRST = [6, 6]
QBAR_FIRST = [-1, -9, 9, 1]

D_FIRST = [F(-4751, 5192), F(909, 1298), F(6091, 15576), F(-1165, 5192), F(129, 2596), F(-25, 15576)]
G_FIRST = [F(-47888, 14245), F(1790, 407), F(-14545, 9768), F(8997, 16280), F(-2335, 22792), F(25, 9768)]
G_SECOND = [F(16, 105), F(-31, 24), F(29, 24), F(-3, 40), F(1, 168)]
STAG = [F(1, 24), F(-9, 8), F(9, 8), F(-1, 24)]


def _put(M, i, j0, coeffs, sign=1):
    for k, c in enumerate(coeffs):
        M[i, j0 + k] = sign * float(c)


def dense_cfd(N):
    """Dense (P, Q, Pbar, Qbar) with 1/h folded into Q and Qbar."""
    h = 1.0 / N
    n = N + 1
    P = np.zeros((n, n))
    Q = np.zeros((n, n))
    for i in range(1, n - 1):
        P[i, i - 1:i + 2] = (1, 4, 1)
        Q[i, i - 1], Q[i, i + 1] = -3, 3
    P[0, :2] = P_FIRST
    P[-1, -2:] = P_FIRST[::-1]
    _put(Q, 0, 0, Q_FIRST)
    _put(Q, n - 1, n - 4, Q_FIRST[::-1], -1)
    m = N - 1
    Pb = np.zeros((m, m))
    Qb = np.zeros((m, n))
    for r in range(1, m - 1):
        Pb[r, r - 1:r + 2] = (1, 4, 1)
        Qb[r, r], Qb[r, r + 2] = -3, 3
    Pb[0, :2] = PBAR_FIRST
    Pb[-1, -2:] = PBAR_FIRST[::-1]
    _put(Qb, 0, 0, QBAR_FIRST)
    _put(Qb, m - 1, n - 4, QBAR_FIRST[::-1], -1)
    return P, Q / h, Pb, Qb / h


def dense_mimetic(N):
    h = 1.0 / N
    D = np.zeros((N, N + 1))
    for r in range(1, N - 1):
        _put(D, r, r - 1, STAG)
    _put(D, 0, 0, D_FIRST)
    _put(D, N - 1, N + 1 - 6, D_FIRST[::-1], -1)
    G = np.zeros((N + 1, N + 2))
    for r in range(2, N - 1):
        _put(G, r, r - 1, STAG)
    _put(G, 0, 0, G_FIRST)
    _put(G, 1, 0, G_SECOND)
    _put(G, N - 1, N + 2 - 5, G_SECOND[::-1], -1)
    _put(G, N, N + 2 - 6, G_FIRST[::-1], -1)
    return D / h, G / h


# ---------------------------------------------------------------- ADI step

def _solve_affine(fmap, n):
    """Solve ``z = fmap(z)`` for an affine map on R^n by probing columns."""
    z0 = np.zeros(n)
    c = fmap(z0)
    M = np.empty((n, n))
    for j in range(n):
        e = np.zeros(n)
        e[j] = 1.0
        M[:, j] = fmap(e) - c
    return np.linalg.solve(np.eye(n) - M, c)


def reference_step(scheme, state, sampled, dt, pin_edges):
    """One Peaceman-Rachford step with each stage solved exactly.

    ``sampled`` supplies boundary data and forcing (a SampledCase); kappa and
    rho are taken as 1.
    """
    N = state.N
    half = 0.5 * dt
    t0, t1 = state.time, state.time + dt
    U, V, W = state.U.copy(), state.V.copy(), state.W.copy()
    if scheme == "cfd":
        P, Q, Pb, Qb = dense_cfd(N)
        Dfull = np.linalg.solve(P, Q)          # pressure -> velocity nodes
        Dred = np.linalg.solve(Pb, Qb)         # velocity -> interior pressure
    else:
        Dred, Dfull = dense_mimetic(N)         # D: velocity -> pressure, G: pressure -> velocity
    ni = U.shape[0] - 2                        # interior pressure count per direction
    nv = V.shape[1]                            # velocity nodes along x

    # stage 1
    A = U[1:-1, 1:-1] - half * (Dred @ W[:, 1:-1] - sampled.forcing(t0))
    Ws = W.copy()
    Ws[:, 1:-1] -= half * (Dfull @ U[:, 1:-1])
    ring = sampled.U(t0 + half)
    Us = U.copy()
    Us[0, :], Us[-1, :], Us[:, 0], Us[:, -1] = ring[0, :], ring[-1, :], ring[:, 0], ring[:, -1]
    Vh = sampled.V(t0 + half)
    if pin_edges:
        Wh = sampled.W(t0 + half)
        Ws[0, 1:-1], Ws[-1, 1:-1] = Wh[0, 1:-1], Wh[-1, 1:-1]
    Vred0 = V[1:-1, :].copy()

    def stage1(z):
        u = z[:ni * ni].reshape(ni, ni)
        v = z[ni * ni:].reshape(ni, nv)
        if pin_edges:
            v = v.copy()
            v[:, 0], v[:, -1] = Vh[1:-1, 0], Vh[1:-1, -1]
        Uf = Us.copy()
        Uf[1:-1, 1:-1] = u
        u_new = A - half * (v @ Dred.T)
        v_new = Vred0 - half * (Uf[1:-1, :] @ Dfull.T)
        if pin_edges:
            v_new[:, 0], v_new[:, -1] = Vh[1:-1, 0], Vh[1:-1, -1]
        return np.concatenate([u_new.ravel(), v_new.ravel()])

    z = _solve_affine(stage1, ni * ni + ni * nv)
    Us[1:-1, 1:-1] = z[:ni * ni].reshape(ni, ni)
    Vs = V.copy()
    Vs[1:-1, :] = z[ni * ni:].reshape(ni, nv)

    # stage 2
    C = Us[1:-1, 1:-1] - half * (Vs[1:-1, :] @ Dred.T - sampled.forcing(t1))
    Vn = Vs.copy()
    Vn[1:-1, :] -= half * (Us[1:-1, :] @ Dfull.T)
    V1, W1 = sampled.V(t1), sampled.W(t1)
    if pin_edges:
        Vn[1:-1, 0], Vn[1:-1, -1] = V1[1:-1, 0], V1[1:-1, -1]
    ring = sampled.U(t1)
    Un = Us.copy()
    Un[0, :], Un[-1, :], Un[:, 0], Un[:, -1] = ring[0, :], ring[-1, :], ring[:, 0], ring[:, -1]
    Wred0 = Ws[:, 1:-1].copy()

    def stage2(z):
        u = z[:ni * ni].reshape(ni, ni)
        w = z[ni * ni:].reshape(nv, ni)
        if pin_edges:
            w = w.copy()
            w[0, :], w[-1, :] = W1[0, 1:-1], W1[-1, 1:-1]
        Uf = Un.copy()
        Uf[1:-1, 1:-1] = u
        u_new = C - half * (Dred @ w)
        w_new = Wred0 - half * (Dfull @ Uf[:, 1:-1])
        if pin_edges:
            w_new[0, :], w_new[-1, :] = W1[0, 1:-1], W1[-1, 1:-1]
        return np.concatenate([u_new.ravel(), w_new.ravel()])

    z = _solve_affine(stage2, ni * ni + nv * ni)
    Un[1:-1, 1:-1] = z[:ni * ni].reshape(ni, ni)
    Wn = Ws.copy()
    Wn[:, 1:-1] = z[ni * ni:].reshape(nv, ni)
    Vn[0, :], Vn[-1, :] = V1[0, :], V1[-1, :]
    Wn[:, 0], Wn[:, -1] = W1[:, 0], W1[:, -1]
    return Un, Vn, Wn
