# cython: language_level=3
"""Compiled implementations of the hot kernels.

Same contracts and random-number consumption as ``_fallback``; see there for
parameter documentation.
"""
import numpy as np

cimport cython
from libc.math cimport sqrt

NAME = "cython"

CHAIN_OK = 0
CHAIN_EXHAUSTED = 1
CHAIN_STUCK = 2
CHAIN_UNBOUNDED = 3

cdef double _HUGE = 1e100


@cython.boundscheck(False)
@cython.wraparound(False)
def simplex_pivot_loop(double[:, ::1] T, long long[::1] basis, Py_ssize_t end_col,
                       double tol, long long max_pivots):
    cdef Py_ssize_t m = T.shape[0] - 1
    cdef Py_ssize_t width = T.shape[1]
    cdef Py_ssize_t rhs = width - 1
    cdef long long pivots = 0
    cdef Py_ssize_t i, j, r, k
    cdef double best, ratio, piv, factor
    while pivots < max_pivots:
        j = -1
        for k in range(end_col):
            if T[m, k] > tol:
                j = k
                break
        if j < 0:
            return 0, pivots
        r = -1
        best = 0.0
        for i in range(m):
            if T[i, j] > tol:
                ratio = T[i, rhs] / T[i, j]
                if r < 0 or ratio < best:
                    best = ratio
                    r = i
        if r < 0:
            return 1, pivots
        piv = T[r, j]
        for k in range(width):
            T[r, k] /= piv
        for i in range(m + 1):
            if i == r:
                continue
            factor = T[i, j]
            if factor != 0.0:
                for k in range(width):
                    T[i, k] -= factor * T[r, k]
        basis[r] = j
        pivots += 1
    return 2, pivots


@cython.boundscheck(False)
@cython.wraparound(False)
def chain_steps(double[::1] x, double[:, ::1] nb, double[:, ::1] A, double[::1] b,
                double[:, ::1] normals, double[::1] uniforms, double[:, ::1] out,
                Py_ssize_t start, long long fails_in,
                double chord_tol=1e-12, long long max_retries=100):
    cdef Py_ssize_t want = out.shape[0]
    cdef Py_ssize_t navail = normals.shape[0]
    cdef Py_ssize_t dnull = nb.shape[0]
    cdef Py_ssize_t dim = nb.shape[1]
    cdef Py_ssize_t nrows = A.shape[0]
    cdef Py_ssize_t written = start
    cdef Py_ssize_t consumed = 0
    cdef long long fails = fails_in
    cdef Py_ssize_t i, r, k
    cdef double norm, u, lo, hi, sr, mr, bound, lam, acc
    cdef double[::1] d = np.empty(dim)
    while written < want:
        if consumed >= navail:
            return written, consumed, fails, CHAIN_EXHAUSTED
        u = uniforms[consumed]
        norm = 0.0
        for k in range(dnull):
            norm += normals[consumed, k] * normals[consumed, k]
        norm = sqrt(norm)
        if norm < 1e-14:
            consumed += 1
            fails += 1
            if fails >= max_retries:
                return written, consumed, fails, CHAIN_STUCK
            continue
        for i in range(dim):
            acc = 0.0
            for k in range(dnull):
                acc += (normals[consumed, k] / norm) * nb[k, i]
            d[i] = acc
        consumed += 1
        lo = -_HUGE
        hi = _HUGE
        for r in range(nrows):
            sr = 0.0
            mr = 0.0
            for i in range(dim):
                sr += A[r, i] * d[i]
                mr += A[r, i] * x[i]
            mr -= b[r]
            if sr > 1e-14:
                bound = -mr / sr
                if bound > lo:
                    lo = bound
            elif sr < -1e-14:
                bound = -mr / sr
                if bound < hi:
                    hi = bound
        if lo <= -_HUGE * 0.5 or hi >= _HUGE * 0.5:
            return written, consumed, fails, CHAIN_UNBOUNDED
        if hi - lo < chord_tol:
            fails += 1
            if fails >= max_retries:
                return written, consumed, fails, CHAIN_STUCK
            continue
        fails = 0
        lam = lo + u * (hi - lo)
        for i in range(dim):
            x[i] += lam * d[i]
            out[written, i] = x[i]
        written += 1
    return written, consumed, fails, CHAIN_OK


@cython.boundscheck(False)
@cython.wraparound(False)
def tally_block(double[:, ::1] values, double[:, ::1] mobius,
                long long[:, ::1] rank_counts, long long[:, ::1] strict_counts,
                long long[:, ::1] indiff_counts, double[:, ::1] first_sum,
                long long[::1] first_count, double[::1] bary_sum):
    cdef Py_ssize_t B = values.shape[0]
    cdef Py_ssize_t l = values.shape[1]
    cdef Py_ssize_t d = mobius.shape[1]
    cdef Py_ssize_t t, h, k, c
    cdef long long above
    cdef double vk
    for t in range(B):
        for k in range(l):
            vk = values[t, k]
            above = 0
            for h in range(l):
                if values[t, h] > vk:
                    above += 1
                    strict_counts[h, k] += 1
                elif values[t, h] == vk and h != k:
                    indiff_counts[h, k] += 1
            rank_counts[k, above] += 1
            if above == 0:
                first_count[k] += 1
                for c in range(d):
                    first_sum[k, c] += mobius[t, c]
        for c in range(d):
            bary_sum[c] += mobius[t, c]
