# cython: boundscheck=False, wraparound=False, cdivision=True
"""Compiled kernels. Same contracts as `reference`; see that module."""

import numpy as np

from libc.math cimport exp, log, sqrt, tanh, INFINITY
from libc.stdint cimport int64_t

NAME = "compiled"

cdef double GELU_C = sqrt(2.0 / np.pi)
cdef double GELU_A = 0.044715


def layernorm_fwd(double[:, ::1] x, double[::1] gamma, double[::1] beta, double eps):
    cdef Py_ssize_t n = x.shape[0], d = x.shape[1]
    y_arr = np.empty((n, d), dtype=np.float64)
    mean_arr = np.empty(n, dtype=np.float64)
    rstd_arr = np.empty(n, dtype=np.float64)
    cdef double[:, ::1] y = y_arr
    cdef double[::1] mean = mean_arr
    cdef double[::1] rstd = rstd_arr
    cdef Py_ssize_t i, j
    cdef double mu, var, dx, r
    for i in range(n):
        mu = 0.0
        for j in range(d):
            mu += x[i, j]
        mu /= d
        var = 0.0
        for j in range(d):
            dx = x[i, j] - mu
            var += dx * dx
        var /= d
        r = 1.0 / sqrt(var + eps)
        mean[i] = mu
        rstd[i] = r
        for j in range(d):
            y[i, j] = (x[i, j] - mu) * r * gamma[j] + beta[j]
    return y_arr, mean_arr, rstd_arr


def layernorm_bwd(double[:, ::1] dy, double[:, ::1] x, double[::1] gamma,
                  double[::1] mean, double[::1] rstd):
    cdef Py_ssize_t n = x.shape[0], d = x.shape[1]
    dx_arr = np.empty((n, d), dtype=np.float64)
    dgamma_arr = np.zeros(d, dtype=np.float64)
    dbeta_arr = np.zeros(d, dtype=np.float64)
    cdef double[:, ::1] dx = dx_arr
    cdef double[::1] dgamma = dgamma_arr
    cdef double[::1] dbeta = dbeta_arr
    cdef Py_ssize_t i, j
    cdef double xhat, dyh, m1, m2
    for i in range(n):
        m1 = 0.0
        m2 = 0.0
        for j in range(d):
            xhat = (x[i, j] - mean[i]) * rstd[i]
            dyh = dy[i, j] * gamma[j]
            dbeta[j] += dy[i, j]
            dgamma[j] += dy[i, j] * xhat
            m1 += dyh
            m2 += dyh * xhat
        m1 /= d
        m2 /= d
        for j in range(d):
            xhat = (x[i, j] - mean[i]) * rstd[i]
            dyh = dy[i, j] * gamma[j]
            dx[i, j] = rstd[i] * (dyh - m1 - xhat * m2)
    return dx_arr, dgamma_arr, dbeta_arr


def causal_softmax_fwd(double[:, ::1] scores):
    cdef Py_ssize_t n = scores.shape[0]
    p_arr = np.zeros((n, n), dtype=np.float64)
    cdef double[:, ::1] p = p_arr
    cdef Py_ssize_t i, j
    cdef double mx, s, e
    for i in range(n):
        mx = -INFINITY
        for j in range(i + 1):
            if scores[i, j] > mx:
                mx = scores[i, j]
        s = 0.0
        for j in range(i + 1):
            e = exp(scores[i, j] - mx)
            p[i, j] = e
            s += e
        for j in range(i + 1):
            p[i, j] /= s
    return p_arr


def causal_softmax_bwd(double[:, ::1] dprobs, double[:, ::1] probs):
    cdef Py_ssize_t n = probs.shape[0]
    ds_arr = np.zeros((n, n), dtype=np.float64)
    cdef double[:, ::1] ds = ds_arr
    cdef Py_ssize_t i, j
    cdef double dot
    for i in range(n):
        dot = 0.0
        for j in range(i + 1):
            dot += dprobs[i, j] * probs[i, j]
        for j in range(i + 1):
            ds[i, j] = probs[i, j] * (dprobs[i, j] - dot)
    return ds_arr


def softmax_xent_fwd(double[:, ::1] logits, int64_t[::1] targets, unsigned char[::1] valid):
    cdef Py_ssize_t n = logits.shape[0], v = logits.shape[1]
    probs_arr = np.empty((n, v), dtype=np.float64)
    cdef double[:, ::1] probs = probs_arr
    cdef Py_ssize_t i, j
    cdef double mx, s, nll_sum = 0.0
    for i in range(n):
        mx = -INFINITY
        for j in range(v):
            if logits[i, j] > mx:
                mx = logits[i, j]
        s = 0.0
        for j in range(v):
            probs[i, j] = exp(logits[i, j] - mx)
            s += probs[i, j]
        for j in range(v):
            probs[i, j] /= s
        if valid[i]:
            nll_sum += log(s) - (logits[i, targets[i]] - mx)
    return nll_sum, probs_arr


def softmax_xent_bwd(double[:, ::1] probs, int64_t[::1] targets, unsigned char[::1] valid,
                     double scale):
    cdef Py_ssize_t n = probs.shape[0], v = probs.shape[1]
    dl_arr = np.zeros((n, v), dtype=np.float64)
    cdef double[:, ::1] dl = dl_arr
    cdef Py_ssize_t i, j
    for i in range(n):
        if not valid[i]:
            continue
        for j in range(v):
            dl[i, j] = probs[i, j] * scale
        dl[i, targets[i]] -= scale
    return dl_arr


def gelu_fwd(double[:, ::1] x):
    cdef Py_ssize_t n = x.shape[0], d = x.shape[1]
    y_arr = np.empty((n, d), dtype=np.float64)
    cdef double[:, ::1] y = y_arr
    cdef Py_ssize_t i, j
    cdef double xv, u
    for i in range(n):
        for j in range(d):
            xv = x[i, j]
            u = GELU_C * (xv + GELU_A * xv * xv * xv)
            y[i, j] = 0.5 * xv * (1.0 + tanh(u))
    return y_arr


def gelu_bwd(double[:, ::1] dy, double[:, ::1] x):
    cdef Py_ssize_t n = x.shape[0], d = x.shape[1]
    dx_arr = np.empty((n, d), dtype=np.float64)
    cdef double[:, ::1] dx = dx_arr
    cdef Py_ssize_t i, j
    cdef double xv, u, t, du
    for i in range(n):
        for j in range(d):
            xv = x[i, j]
            u = GELU_C * (xv + GELU_A * xv * xv * xv)
            t = tanh(u)
            du = GELU_C * (1.0 + 3.0 * GELU_A * xv * xv)
            dx[i, j] = dy[i, j] * (0.5 * (1.0 + t) + 0.5 * xv * (1.0 - t * t) * du)
    return dx_arr


def adamw_update(double[::1] param, double[::1] grad, double[::1] m, double[::1] v,
                 int64_t t, double lr, double beta1, double beta2, double eps,
                 double weight_decay):
    cdef Py_ssize_t n = param.shape[0]
    cdef double bc1 = 1.0 - beta1 ** t
    cdef double bc2 = 1.0 - beta2 ** t
    cdef Py_ssize_t i
    cdef double mhat, vhat
    for i in range(n):
        m[i] = beta1 * m[i] + (1.0 - beta1) * grad[i]
        v[i] = beta2 * v[i] + (1.0 - beta2) * grad[i] * grad[i]
        mhat = m[i] / bc1
        vhat = v[i] / bc2
        param[i] -= lr * (mhat / (sqrt(vhat) + eps) + weight_decay * param[i])
