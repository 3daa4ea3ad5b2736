# cython: boundscheck=False, wraparound=False, cdivision=True, initializedcheck=False
"""Compiled batched line-advection kernel.

Mirrors ecsldg._advect_numpy.advect_lines (same update, same flux-form
mean override, bit-exact integer-shift path); the test suite checks the
two implementations agree to round-off.  Loops are nogil so study
drivers can run member simulations on real threads.
"""
import numpy as np

from libc.math cimport floor

cdef double FRAC_SNAP = 1e-14
cdef int MAX_P = 9  # degree cap 8


cdef inline void _legendre(int k, double x, double *out) noexcept nogil:
    cdef int a
    out[0] = 1.0
    if k >= 1:
        out[1] = x
    for a in range(1, k):
        out[a + 1] = ((2 * a + 1) * x * out[a] - a * out[a - 1]) / (a + 1)


def advect_lines(const double[:, :, ::1] vals, const double[::1] shifts, double dx,
                 bint periodic, const double[::1] gl_x, const double[::1] gl_w,
                 const double[:, ::1] vand, const double[:, ::1] to_modal):
    """Advect each line of vals (L, N, k+1) by its own constant shift."""
    cdef Py_ssize_t L = vals.shape[0]
    cdef Py_ssize_t N = vals.shape[1]
    cdef int P = <int> vals.shape[2]
    cdef int k = P - 1
    if P > MAX_P:
        raise ValueError("degree exceeds compiled kernel cap")

    out_arr = np.zeros((L, N, P))
    cdef double[:, :, ::1] out = out_arr
    mean_arr = np.zeros(N)
    seg_arr = np.zeros(N)
    cdef double[::1] mean = mean_arr
    cdef double[::1] seg = seg_arr

    cdef double m0[81]
    cdef double m1[81]
    cdef double a0[81]
    cdef double a1[81]
    cdef double tmp[81]
    cdef double pa[9]
    cdef double pb[9]
    cdef double tseg[9]
    cdef double r1[9]

    cdef Py_ssize_t l, j
    cdef long long c, j0, j1
    cdef int a, b, p, q, g
    cdef double sc, rho, eta, w, acc, scale_a, m_tgt, m_cur

    with nogil:
        for l in range(L):
            sc = shifts[l] / dx
            c = <long long> floor(sc)
            rho = sc - c
            if rho > 1.0 - FRAC_SNAP:
                c += 1
                rho = 0.0
            elif rho < FRAC_SNAP:
                rho = 0.0

            if rho == 0.0:
                # pure integer translation: copy rows bit-for-bit
                for j in range(N):
                    j0 = j - c
                    if periodic:
                        j0 = j0 % N
                        if j0 < 0:
                            j0 += N
                    for p in range(P):
                        out[l, j, p] = vals[l, j0, p] if 0 <= j0 < N else 0.0
                continue

            for a in range(P * P):
                m0[a] = 0.0
                m1[a] = 0.0
            for a in range(P):
                tseg[a] = 0.0
            # modal transfer matrices via (k+1)-point Gauss on each segment
            for g in range(P):
                eta = -1.0 + (1.0 - rho) * (gl_x[g] + 1.0)
                _legendre(k, eta, pb)
                _legendre(k, eta + 2.0 * rho, pa)
                w = gl_w[g] * (1.0 - rho)
                for a in range(P):
                    for b in range(P):
                        m0[a * P + b] += w * pa[a] * pb[b]
                eta = (1.0 - 2.0 * rho) + rho * (gl_x[g] + 1.0)
                _legendre(k, eta, pb)
                _legendre(k, eta + 2.0 * rho - 2.0, pa)
                w = gl_w[g] * rho
                for a in range(P):
                    tseg[a] += w * pb[a]
                    for b in range(P):
                        m1[a * P + b] += w * pa[a] * pb[b]
            for a in range(P):
                scale_a = (2.0 * a + 1.0) / 2.0
                for b in range(P):
                    m0[a * P + b] *= scale_a
                    m1[a * P + b] *= scale_a

            # nodal transfer: A[q, p] = sum_b to_modal[q, b] sum_a M[a, b] vand[p, a]
            for b in range(P):
                for p in range(P):
                    acc = 0.0
                    for a in range(P):
                        acc += m0[a * P + b] * vand[p, a]
                    tmp[b * P + p] = acc
            for q in range(P):
                for p in range(P):
                    acc = 0.0
                    for b in range(P):
                        acc += to_modal[q, b] * tmp[b * P + p]
                    a0[q * P + p] = acc
            for b in range(P):
                for p in range(P):
                    acc = 0.0
                    for a in range(P):
                        acc += m1[a * P + b] * vand[p, a]
                    tmp[b * P + p] = acc
            for q in range(P):
                for p in range(P):
                    acc = 0.0
                    for b in range(P):
                        acc += to_modal[q, b] * tmp[b * P + p]
                    a1[q * P + p] = acc

            # nodal functional of the top-rho segment mass
            for q in range(P):
                acc = 0.0
                for a in range(P):
                    acc += to_modal[q, a] * (0.5 * tseg[a])
                r1[q] = acc

            # upstream cell means and fractional-segment masses
            for j in range(N):
                acc = 0.0
                for q in range(P):
                    acc += 0.5 * gl_w[q] * vals[l, j, q]
                mean[j] = acc
                acc = 0.0
                for q in range(P):
                    acc += r1[q] * vals[l, j, q]
                seg[j] = acc

            for j in range(N):
                j0 = j - c
                j1 = j0 - 1
                if periodic:
                    j0 = j0 % N
                    if j0 < 0:
                        j0 += N
                    j1 = j1 % N
                    if j1 < 0:
                        j1 += N
                for p in range(P):
                    acc = 0.0
                    if 0 <= j0 < N:
                        for q in range(P):
                            acc += vals[l, j0, q] * a0[q * P + p]
                    if 0 <= j1 < N:
                        for q in range(P):
                            acc += vals[l, j1, q] * a1[q * P + p]
                    out[l, j, p] = acc
                # flux-form mean override: segment mass enters once with each
                # sign, so the line total telescopes without systematic bias
                m_tgt = 0.0
                if 0 <= j1 < N:
                    m_tgt += seg[j1]
                if 0 <= j0 < N:
                    m_tgt += mean[j0] - seg[j0]
                m_cur = 0.0
                for p in range(P):
                    m_cur += 0.5 * gl_w[p] * out[l, j, p]
                for p in range(P):
                    out[l, j, p] += m_tgt - m_cur
    return out_arr
