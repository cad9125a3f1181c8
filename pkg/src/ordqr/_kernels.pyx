# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True, initializedcheck=False
"""Compiled sampler hot loops.

Same contract and random-number consumption order as ``_kernels_py``; see
that module for the algorithms.
"""

import numpy as np
cimport numpy as cnp
from cpython.pycapsule cimport PyCapsule_GetPointer, PyCapsule_IsValid
from libc.math cimport exp, log, log1p, expm1, sqrt, nextafter, INFINITY
from numpy.random cimport bitgen_t
cimport scipy.special.cython_special as csc

cnp.import_array()

NAME = "compiled"

cdef double LOG_PROB_FLOOR = log(1e-300)
cdef double TAIL_CUTOFF = 5.0
cdef double NARROW_WIDTH = 0.25
cdef double TINY = 2.2250738585072014e-308


cdef inline double _log_interval_prob(double lo, double hi, double p) noexcept nogil:
    cdef double out
    if hi <= 0:
        out = log(p) + (1 - p) * hi + log(-expm1((1 - p) * (lo - hi)))
    elif lo > 0:
        out = log(1 - p) - p * lo + log(-expm1(-p * (hi - lo)))
    else:
        out = log(1.0 - (1 - p) * exp(-p * hi) - p * exp((1 - p) * lo))
    if not (out >= LOG_PROB_FLOOR):
        out = LOG_PROB_FLOOR
    return out


cdef inline double _al_cdf_std(double u, double p) noexcept nogil:
    if u <= 0:
        return p * exp((1 - p) * u)
    return 1.0 - (1 - p) * exp(-p * u)


def ordinal_logprob(mu, y, cut, double sigma, double p):
    cdef const double[::1] mu_v = np.ascontiguousarray(mu, dtype=np.float64)
    cdef const cnp.int64_t[::1] y_v = np.ascontiguousarray(y, dtype=np.int64)
    cdef const double[::1] cut_v = np.ascontiguousarray(cut, dtype=np.float64)
    cdef Py_ssize_t n = mu_v.shape[0], i
    cdef Py_ssize_t ncut = cut_v.shape[0]
    cdef cnp.int64_t yi
    out = np.empty(n, dtype=np.float64)
    cdef double[::1] out_v = out
    for i in range(n):
        yi = y_v[i]
        if yi < 1 or yi >= ncut:
            raise IndexError(f"outcome code {yi} outside 1..{ncut - 1}")
    with nogil:
        for i in range(n):
            yi = y_v[i]
            out_v[i] = _log_interval_prob(
                (cut_v[yi - 1] - mu_v[i]) / sigma, (cut_v[yi] - mu_v[i]) / sigma, p
            )
    return out


def category_probs_mean(mu, cut, double sigma, double p):
    cdef const double[::1] mu_v = np.ascontiguousarray(mu, dtype=np.float64)
    cdef const double[::1] cut_v = np.ascontiguousarray(cut, dtype=np.float64)
    cdef Py_ssize_t n = mu_v.shape[0], ncut = cut_v.shape[0], i, j
    cdef double prev, cur
    out = np.zeros(ncut - 1, dtype=np.float64)
    cdef double[::1] out_v = out
    with nogil:
        for i in range(n):
            prev = _al_cdf_std((cut_v[0] - mu_v[i]) / sigma, p)
            for j in range(1, ncut):
                cur = _al_cdf_std((cut_v[j] - mu_v[i]) / sigma, p)
                out_v[j - 1] += cur - prev
                prev = cur
        if n > 0:
            for j in range(ncut - 1):
                out_v[j] /= n
    return out


def gig_half(lam, eta, normals, uniforms):
    lam_b, eta_b, nrm_b, unf_b = np.broadcast_arrays(
        np.asarray(lam, dtype=np.float64), np.asarray(eta, dtype=np.float64),
        np.asarray(normals, dtype=np.float64), np.asarray(uniforms, dtype=np.float64),
    )
    shape = lam_b.shape
    cdef const double[::1] lam_v = np.ascontiguousarray(lam_b).ravel()
    cdef const double[::1] eta_v = np.ascontiguousarray(eta_b).ravel()
    cdef const double[::1] nrm_v = np.ascontiguousarray(nrm_b).ravel()
    cdef const double[::1] unf_v = np.ascontiguousarray(unf_b).ravel()
    cdef Py_ssize_t n = lam_v.shape[0], i
    cdef double s, a, x1, x
    out = np.empty(n, dtype=np.float64)
    cdef double[::1] out_v = out
    with nogil:
        for i in range(n):
            s = sqrt(lam_v[i] / eta_v[i])
            a = nrm_v[i] * nrm_v[i] / (2.0 * eta_v[i])
            x1 = s + a + sqrt(a * a + 2.0 * a * s)
            if unf_v[i] * (x1 + s) <= x1:
                x = x1
            else:
                x = s * s / x1
            if not (x >= TINY):
                x = TINY
            out_v[i] = x
    return out.reshape(shape)


cdef inline double _tail_draw(double a, double b, bitgen_t *bg) noexcept nogil:
    cdef double lam = 0.5 * (a + sqrt(a * a + 4.0))
    cdef double em = expm1(-lam * (b - a))
    cdef double peak = lam if lam < b else b
    cdef double u1, u2, x
    while True:
        u1 = bg.next_double(bg.state)
        u2 = bg.next_double(bg.state)
        x = a - log1p(u1 * em) / lam
        if u2 <= exp(-0.5 * ((x - lam) * (x - lam) - (peak - lam) * (peak - lam))):
            return x


cdef inline double _narrow_draw(double a, double b, bitgen_t *bg) noexcept nogil:
    cdef double m = a if a > 0 else (b if b < 0 else 0.0)
    cdef double u1, u2, x
    while True:
        u1 = bg.next_double(bg.state)
        u2 = bg.next_double(bg.state)
        x = a + u1 * (b - a)
        if u2 <= exp(0.5 * (m * m - x * x)):
            return x


def truncnorm(mean, sd, lower, upper, uniforms, rng):
    m_b, s_b, lo_b, hi_b, u_b = np.broadcast_arrays(
        np.asarray(mean, dtype=np.float64), np.asarray(sd, dtype=np.float64),
        np.asarray(lower, dtype=np.float64), np.asarray(upper, dtype=np.float64),
        np.asarray(uniforms, dtype=np.float64),
    )
    shape = m_b.shape
    cdef const double[::1] m_v = np.ascontiguousarray(m_b).ravel()
    cdef const double[::1] s_v = np.ascontiguousarray(s_b).ravel()
    cdef const double[::1] lo_v = np.ascontiguousarray(lo_b).ravel()
    cdef const double[::1] hi_v = np.ascontiguousarray(hi_b).ravel()
    cdef const double[::1] u_v = np.ascontiguousarray(u_b).ravel()
    cdef Py_ssize_t n = m_v.shape[0], i
    cdef double a, b, x, z, pa, pb

    bit_generator = rng.bit_generator
    capsule = bit_generator.capsule
    if not PyCapsule_IsValid(capsule, "BitGenerator"):
        raise ValueError("invalid bit generator capsule")
    cdef bitgen_t *bg = <bitgen_t *> PyCapsule_GetPointer(capsule, "BitGenerator")

    out = np.empty(n, dtype=np.float64)
    cdef double[::1] out_v = out
    with bit_generator.lock, nogil:
        for i in range(n):
            a = (lo_v[i] - m_v[i]) / s_v[i]
            b = (hi_v[i] - m_v[i]) / s_v[i]
            if a >= TAIL_CUTOFF or b <= -TAIL_CUTOFF or b - a < NARROW_WIDTH:
                continue
            if a > 0:
                pa = csc.ndtr(-a)
                pb = csc.ndtr(-b)
                x = -csc.ndtri(pa - u_v[i] * (pa - pb))
            else:
                pa = csc.ndtr(a)
                pb = csc.ndtr(b)
                x = csc.ndtri(pa + u_v[i] * (pb - pa))
            out_v[i] = x
        for i in range(n):
            a = (lo_v[i] - m_v[i]) / s_v[i]
            b = (hi_v[i] - m_v[i]) / s_v[i]
            if a >= TAIL_CUTOFF:
                out_v[i] = _tail_draw(a, b, bg)
            elif b <= -TAIL_CUTOFF:
                out_v[i] = -_tail_draw(-b, -a, bg)
            elif b - a < NARROW_WIDTH:
                out_v[i] = _narrow_draw(a, b, bg)
        for i in range(n):
            a = (lo_v[i] - m_v[i]) / s_v[i]
            b = (hi_v[i] - m_v[i]) / s_v[i]
            x = out_v[i]
            if x <= a:
                x = nextafter(a, INFINITY)
            if x >= b:
                x = nextafter(b, -INFINITY)
            z = m_v[i] + s_v[i] * x
            if z <= lo_v[i]:
                z = nextafter(lo_v[i], INFINITY)
            if z >= hi_v[i]:
                z = nextafter(hi_v[i], -INFINITY)
            out_v[i] = z
    return out.reshape(shape)
