"""Numba kernels for the block coordinate descent solvers.

All kernels work on precomputed Gram quantities so one group update costs
O(M*H) instead of O(N*H):

    G2 = (2/N) X'X,  C2 = (2/N) X'P,  c = diag(G2),  Q = G2 @ B.

Row norms are accumulated with the same sequential loop everywhere so that
lambda_max, the soft-threshold test, and the KKT certificate agree bitwise
(fitting at lambda = lambda_max must return an exactly zero matrix).
"""
import math

import numpy as np
from numba import njit


@njit(cache=True, nogil=True)
def row_norm(v):
    s = 0.0
    for h in range(v.shape[0]):
        s += v[h] * v[h]
    return math.sqrt(s)


@njit(cache=True, nogil=True)
def row_norms(a):
    out = np.empty(a.shape[0])
    for j in range(a.shape[0]):
        out[j] = row_norm(a[j])
    return out


@njit(cache=True, nogil=True)
def kkt_residual_state(g, c, b, lam):
    """Max group violation of the stationarity conditions.

    g must be the loss gradient factor (2/N) X'(P - XB) row by row.
    """
    m, h = b.shape
    worst = 0.0
    for j in range(m):
        if c[j] <= 0.0:
            continue
        bn = row_norm(b[j])
        if bn > 0.0:
            s = 0.0
            for k in range(h):
                r = g[j, k] - lam * b[j, k] / bn
                s += r * r
            viol = math.sqrt(s)
        else:
            viol = row_norm(g[j]) - lam
            if viol < 0.0:
                viol = 0.0
        if viol > worst:
            worst = viol
    return worst


@njit(cache=True, nogil=True)
def objective_state(b, q, c2, pnorm2_n, lam):
    """(1/N)||P - XB||_F^2 + lam * sum_j ||b_j||_2 from the cached state."""
    m, h = b.shape
    quad = 0.0
    penalty = 0.0
    for j in range(m):
        for k in range(h):
            quad += b[j, k] * (0.5 * q[j, k] - c2[j, k])
        penalty += row_norm(b[j])
    return pnorm2_n + quad + lam * penalty


@njit(cache=True, nogil=True)
def bcd_group_lasso(g2, c2, c, lam, b, q, pnorm2_n, tol, kkt_tol, max_iter, obj_out):
    """Cyclic block coordinate descent on the cached state.

    b and q are updated in place (q must equal g2 @ b on entry). Returns
    (sweeps_used, kkt_residual, converged_flag). obj_out[i] receives the
    objective after sweep i+1.
    """
    m, h = b.shape
    new = np.empty(h)
    sweeps = 0
    kkt = np.inf
    converged = False
    for it in range(max_iter):
        sweeps = it + 1
        max_delta = 0.0
        max_b = 0.0
        for j in range(m):
            if c[j] <= 0.0:
                continue
            nrm = 0.0
            for k in range(h):
                new[k] = c2[j, k] - q[j, k] + c[j] * b[j, k]
                nrm += new[k] * new[k]
            nrm = math.sqrt(nrm)
            if nrm <= lam:
                for k in range(h):
                    new[k] = 0.0
            else:
                shrink = (1.0 - lam / nrm) / c[j]
                for k in range(h):
                    new[k] *= shrink
            changed = False
            for k in range(h):
                d = new[k] - b[j, k]
                if d != 0.0:
                    changed = True
                ad = abs(d)
                if ad > max_delta:
                    max_delta = ad
            if changed:
                for i in range(m):
                    gij = g2[i, j]
                    if gij != 0.0:
                        for k in range(h):
                            q[i, k] += gij * (new[k] - b[j, k])
                for k in range(h):
                    b[j, k] = new[k]
        for j in range(m):
            for k in range(h):
                ab = abs(b[j, k])
                if ab > max_b:
                    max_b = ab
        obj_out[it] = objective_state(b, q, c2, pnorm2_n, lam)
        if max_delta <= tol * max(1.0, max_b):
            g = c2 - q
            kkt = kkt_residual_state(g, c, b, lam)
            if kkt <= kkt_tol or max_delta == 0.0:
                # an exact fixed point cannot improve further
                converged = kkt <= kkt_tol
                break
    if not converged:
        g = c2 - q
        kkt = kkt_residual_state(g, c, b, lam)
    return sweeps, kkt, converged
