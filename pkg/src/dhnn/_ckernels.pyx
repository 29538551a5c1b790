# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True
"""Compiled element residual kernels; same contract as ``_kernels_py``."""

import numpy as np
from libc.math cimport exp, fabs, tanh, sin, cos

cdef inline void _act(int code, double z, double* s) noexcept nogil:
    cdef double t, e, d1, p, pm
    if code == 0:
        e = exp(-fabs(z))
        p = 1.0 / (1.0 + e)
        pm = e * p
        if z < 0:
            p, pm = pm, p
        d1 = p * pm
        s[0] = p
        s[1] = d1
        s[2] = d1 * (pm - p)
        s[3] = d1 * (1.0 - 6.0 * p * pm)
    elif code == 1:
        t = tanh(z)
        e = exp(-2.0 * fabs(z))
        d1 = 4.0 * e / ((1.0 + e) * (1.0 + e))
        s[0] = t
        s[1] = d1
        s[2] = -2.0 * t * d1
        s[3] = d1 * (4.0 * t * t - 2.0 * d1)
    else:
        s[0] = sin(z)
        s[1] = cos(z)
        s[2] = -s[0]
        s[3] = -s[1]


def moment_matrix(int act_code, double kappa, const double[:, ::1] W,
                  const double[:, ::1] b, const double[:, ::1] xq,
                  const double[:, :, ::1] phiw):
    cdef Py_ssize_t N = W.shape[0], n = W.shape[1], Q = xq.shape[1], M = phiw.shape[1]
    cdef Py_ssize_t k, j, q, i
    cdef double s[4]
    cdef double w, g
    out_arr = np.zeros((N, M, n))
    cdef double[:, :, ::1] out = out_arr
    with nogil:
        for k in range(N):
            for j in range(n):
                w = W[k, j]
                for q in range(Q):
                    _act(act_code, w * xq[k, q] + b[k, j], s)
                    g = -w * w * s[2] - kappa * s[0]
                    for i in range(M):
                        out[k, i, j] += phiw[k, i, q] * g
    return out_arr


def residual_moments(int act_code, double kappa, const double[:, ::1] W,
                     const double[:, ::1] b, const double complex[:, ::1] c,
                     const double[:, ::1] xq, const double[:, :, ::1] phiw,
                     const double complex[:, ::1] fmom, bint want_grad=True):
    cdef Py_ssize_t N = W.shape[0], n = W.shape[1], Q = xq.shape[1], M = phiw.shape[1]
    cdef Py_ssize_t k, j, q, i
    cdef double s[4]
    cdef double w, w2, x, g, dgw, dgb, cr, ci, accr, acci, sw_r, sw_i, sb_r, sb_i
    m_arr = np.empty((N, M), dtype=np.complex128)
    gW_arr = np.zeros((N, n))
    gb_arr = np.zeros((N, n))
    au_r_arr = np.empty(Q)
    au_i_arr = np.empty(Q)
    rho_r_arr = np.empty(Q)
    rho_i_arr = np.empty(Q)
    cdef double complex[:, ::1] m = m_arr
    cdef double[:, ::1] gW = gW_arr
    cdef double[:, ::1] gb = gb_arr
    cdef double[::1] au_r = au_r_arr, au_i = au_i_arr, rho_r = rho_r_arr, rho_i = rho_i_arr
    with nogil:
        for k in range(N):
            for q in range(Q):
                au_r[q] = 0.0
                au_i[q] = 0.0
            for j in range(n):
                w = W[k, j]
                w2 = w * w
                cr = c[k, j].real
                ci = c[k, j].imag
                for q in range(Q):
                    _act(act_code, w * xq[k, q] + b[k, j], s)
                    g = -w2 * s[2] - kappa * s[0]
                    au_r[q] += cr * g
                    au_i[q] += ci * g
            for i in range(M):
                accr = 0.0
                acci = 0.0
                for q in range(Q):
                    accr += phiw[k, i, q] * au_r[q]
                    acci += phiw[k, i, q] * au_i[q]
                m[k, i] = (accr - fmom[k, i].real) + 1j * (acci - fmom[k, i].imag)
            if not want_grad:
                continue
            # rho_q = sum_i conj(m_i) phiw_iq
            for q in range(Q):
                accr = 0.0
                acci = 0.0
                for i in range(M):
                    accr += phiw[k, i, q] * m[k, i].real
                    acci -= phiw[k, i, q] * m[k, i].imag
                rho_r[q] = accr
                rho_i[q] = acci
            for j in range(n):
                w = W[k, j]
                w2 = w * w
                sw_r = 0.0
                sw_i = 0.0
                sb_r = 0.0
                sb_i = 0.0
                for q in range(Q):
                    x = xq[k, q]
                    _act(act_code, w * x + b[k, j], s)
                    dgw = -2.0 * w * s[2] - w2 * x * s[3] - kappa * x * s[1]
                    dgb = -w2 * s[3] - kappa * s[1]
                    sw_r += rho_r[q] * dgw
                    sw_i += rho_i[q] * dgw
                    sb_r += rho_r[q] * dgb
                    sb_i += rho_i[q] * dgb
                cr = c[k, j].real
                ci = c[k, j].imag
                gW[k, j] = 2.0 * (cr * sw_r - ci * sw_i)
                gb[k, j] = 2.0 * (cr * sb_r - ci * sb_i)
    if not want_grad:
        return m_arr, None, None
    return m_arr, gW_arr, gb_arr
