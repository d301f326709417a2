# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True, initializedcheck=False
"""Compiled numeric kernels: chain DP (Viterbi, forward-backward) and the
sparse per-token SGD pass.  Mirrors ``_pykernels`` exactly in signature."""

import numpy as np
cimport numpy as cnp
from libc.math cimport exp, log, tanh, INFINITY

cnp.import_array()

LOSS_LOGISTIC = 0
LOSS_SQUARED_HINGE = 1
REG_L2 = 0
REG_L1 = 1


def viterbi(double[:, ::1] emit, double[:, ::1] trans, double[::1] start,
            double[::1] end):
    cdef Py_ssize_t n = emit.shape[0], T = emit.shape[1]
    cdef Py_ssize_t i, y, z, best
    cdef double v, bv
    path_arr = np.zeros(n, dtype=np.int64)
    cdef cnp.int64_t[::1] path = path_arr
    if n == 0:
        return path_arr
    beta_arr = np.empty((n, T))
    cdef double[:, ::1] beta = beta_arr
    for y in range(T):
        beta[n - 1, y] = end[y]
    for i in range(n - 2, -1, -1):
        for y in range(T):
            bv = -INFINITY
            for z in range(T):
                v = trans[y, z] + (emit[i + 1, z] + beta[i + 1, z])
                if v > bv:
                    bv = v
            beta[i, y] = bv
    best = 0
    bv = -INFINITY
    for y in range(T):
        v = (start[y] + emit[0, y]) + beta[0, y]
        if v > bv:
            bv = v
            best = y
    path[0] = best
    for i in range(1, n):
        best = 0
        bv = -INFINITY
        for z in range(T):
            v = trans[path[i - 1], z] + (emit[i, z] + beta[i, z])
            if v > bv:
                bv = v
                best = z
        path[i] = best
    return path_arr


cdef inline double _lse2(double a, double b) nogil:
    if a == -INFINITY:
        return b
    if b == -INFINITY:
        return a
    if a > b:
        return a + log(1.0 + exp(b - a))
    return b + log(1.0 + exp(a - b))


cdef double _lse_row(double* buf, Py_ssize_t T) nogil:
    cdef double m = -INFINITY, s = 0.0
    cdef Py_ssize_t k
    for k in range(T):
        if buf[k] > m:
            m = buf[k]
    if m == -INFINITY:
        return m
    for k in range(T):
        s += exp(buf[k] - m)
    return m + log(s)


def forward_backward(double[:, ::1] emit, double[:, ::1] trans,
                     double[::1] start, double[::1] end):
    cdef Py_ssize_t n = emit.shape[0], T = emit.shape[1]
    cdef Py_ssize_t i, y, z
    cdef double logz
    if n == 0:
        return 0.0, np.zeros((0, T)), np.zeros((T, T))
    alpha_arr = np.empty((n, T))
    beta_arr = np.empty((n, T))
    marg_arr = np.empty((n, T))
    pair_arr = np.zeros((T, T))
    buf_arr = np.empty(T)
    cdef double[:, ::1] alpha = alpha_arr
    cdef double[:, ::1] beta = beta_arr
    cdef double[:, ::1] marg = marg_arr
    cdef double[:, ::1] pair = pair_arr
    cdef double[::1] buf = buf_arr
    for y in range(T):
        alpha[0, y] = start[y] + emit[0, y]
    for i in range(1, n):
        for y in range(T):
            for z in range(T):
                buf[z] = alpha[i - 1, z] + trans[z, y]
            alpha[i, y] = _lse_row(&buf[0], T) + emit[i, y]
    for y in range(T):
        beta[n - 1, y] = end[y]
    for i in range(n - 2, -1, -1):
        for y in range(T):
            for z in range(T):
                buf[z] = trans[y, z] + (emit[i + 1, z] + beta[i + 1, z])
            beta[i, y] = _lse_row(&buf[0], T)
    for y in range(T):
        buf[y] = alpha[n - 1, y] + end[y]
    logz = _lse_row(&buf[0], T)
    for i in range(n):
        for y in range(T):
            marg[i, y] = exp(alpha[i, y] + beta[i, y] - logz)
    for i in range(1, n):
        for y in range(T):
            for z in range(T):
                pair[y, z] += exp(alpha[i - 1, y] + trans[y, z]
                                  + (emit[i, z] + beta[i, z]) - logz)
    return logz, marg_arr, pair_arr


def log_partition(double[:, ::1] emit, double[:, ::1] trans,
                  double[::1] start, double[::1] end):
    cdef Py_ssize_t n = emit.shape[0], T = emit.shape[1]
    cdef Py_ssize_t i, y, z
    if n == 0:
        return 0.0
    cur_arr = np.empty(T)
    nxt_arr = np.empty(T)
    buf_arr = np.empty(T)
    cdef double[::1] cur = cur_arr
    cdef double[::1] nxt = nxt_arr
    cdef double[::1] buf = buf_arr
    for y in range(T):
        cur[y] = start[y] + emit[0, y]
    for i in range(1, n):
        for y in range(T):
            for z in range(T):
                buf[z] = cur[z] + trans[z, y]
            nxt[y] = _lse_row(&buf[0], T) + emit[i, y]
        cur[:] = nxt
    for y in range(T):
        buf[y] = cur[y] + end[y]
    return _lse_row(&buf[0], T)


def sgd_epoch(double[:, ::1] W, double[::1] b, double[:, ::1] Q,
              cnp.int64_t[::1] indptr, cnp.int64_t[::1] indices,
              cnp.int64_t[::1] labels, cnp.int64_t[::1] order,
              double lr, int loss, bint multinomial, int reg, double lam,
              double wscale, double u):
    cdef Py_ssize_t T = W.shape[1], F = W.shape[0]
    cdef Py_ssize_t r, idx, p, f, k, y, lo, hi
    cdef double s, m, z, g_k, w, q, nw, tot, step
    g_arr = np.empty(T)
    cdef double[::1] g = g_arr
    for r in range(order.shape[0]):
        idx = order[r]
        lo = indptr[idx]
        hi = indptr[idx + 1]
        y = labels[idx]
        if reg == REG_L2 and lam > 0.0:
            wscale *= 1.0 - lr * lam
            if wscale < 1e-9:
                for f in range(F):
                    for k in range(T):
                        W[f, k] *= wscale
                wscale = 1.0
        for k in range(T):
            g[k] = 0.0
        for p in range(lo, hi):
            f = indices[p]
            for k in range(T):
                g[k] += W[f, k]
        for k in range(T):
            g[k] = g[k] * wscale + b[k]
        if multinomial:
            m = g[0]
            for k in range(1, T):
                if g[k] > m:
                    m = g[k]
            tot = 0.0
            for k in range(T):
                g[k] = exp(g[k] - m)
                tot += g[k]
            for k in range(T):
                g[k] = g[k] / tot
            g[y] -= 1.0
        else:
            for k in range(T):
                z = 1.0 if k == y else -1.0
                s = g[k]
                if loss == LOSS_LOGISTIC:
                    g[k] = -z * 0.5 * (1.0 - tanh(0.5 * z * s))
                else:
                    m = 1.0 - z * s
                    g[k] = -2.0 * z * m if m > 0 else 0.0
        step = lr / wscale
        for p in range(lo, hi):
            f = indices[p]
            for k in range(T):
                W[f, k] -= step * g[k]
        for k in range(T):
            b[k] -= lr * g[k]
        if reg == REG_L1 and lam > 0.0:
            u += lr * lam
            for p in range(lo, hi):
                f = indices[p]
                for k in range(T):
                    w = W[f, k]
                    q = Q[f, k]
                    if w > 0:
                        nw = w - (u + q)
                        if nw < 0.0:
                            nw = 0.0
                    elif w < 0:
                        nw = w + (u - q)
                        if nw > 0.0:
                            nw = 0.0
                    else:
                        nw = w
                    Q[f, k] = q + (nw - w)
                    W[f, k] = nw
    return wscale, u
