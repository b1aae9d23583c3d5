# cython: boundscheck=False, wraparound=False, cdivision=True, initializedcheck=False
"""Compiled hot kernels: batched PAVA, tangent-cone projection, Godunov flux."""
import numpy as np
cimport numpy as cnp
from libc.math cimport fabs

cnp.import_array()


cdef Py_ssize_t _pava(const double* y, double* out, Py_ssize_t n,
                      double* sums, double* comps, double* means,
                      Py_ssize_t* counts) noexcept nogil:
    # Neumaier-compensated block sums; must stay in step with _pykernels._pava_list
    cdef Py_ssize_t top = -1, j, k, pos
    cdef double s, m, e, b, t
    cdef Py_ssize_t c
    for j in range(n):
        s = y[j]
        e = 0.0
        c = 1
        m = y[j]
        while top >= 0 and means[top] > m:
            b = sums[top]
            t = s + b
            if fabs(s) >= fabs(b):
                e += (s - t) + b
            else:
                e += (b - t) + s
            e += comps[top]
            s = t
            c += counts[top]
            top -= 1
            m = (s + e) / c
        top += 1
        sums[top] = s
        comps[top] = e
        counts[top] = c
        means[top] = m
    pos = 0
    for k in range(top + 1):
        for j in range(counts[k]):
            out[pos] = means[k]
            pos += 1
    return top + 1


def pava_rows(y):
    """Project every row of the 2-D array ``y`` onto non-decreasing vectors."""
    cdef double[:, ::1] yv = np.ascontiguousarray(y, dtype=np.float64)
    cdef Py_ssize_t nx = yv.shape[0], nv = yv.shape[1], i, j
    out_arr = np.empty((nx, nv), dtype=np.float64)
    cdef double[:, ::1] ov = out_arr
    cdef double[::1] sums = np.empty(max(nv, 1))
    cdef double[::1] means = np.empty(max(nv, 1))
    cdef double[::1] comps = np.empty(max(nv, 1))
    cdef Py_ssize_t[::1] counts = np.empty(max(nv, 1), dtype=np.intp)
    cdef bint monotone
    with nogil:
        for i in range(nx):
            monotone = True
            for j in range(nv - 1):
                if yv[i, j + 1] < yv[i, j]:
                    monotone = False
                    break
            if monotone:
                for j in range(nv):
                    ov[i, j] = yv[i, j]
            else:
                _pava(&yv[i, 0], &ov[i, 0], nv, &sums[0], &comps[0], &means[0], &counts[0])
    return out_arr


def tangent_rows(state, g, tau):
    """Project each row of ``g`` onto the tangent cone of the monotone cone at ``state``."""
    cdef double[:, ::1] sv = np.ascontiguousarray(state, dtype=np.float64)
    cdef double[:, ::1] gv = np.ascontiguousarray(g, dtype=np.float64)
    cdef double[::1] tv = np.ascontiguousarray(tau, dtype=np.float64)
    cdef Py_ssize_t nx = sv.shape[0], nv = sv.shape[1], i, j, a, k
    out_arr = np.array(gv, dtype=np.float64, copy=True)
    cdef double[:, ::1] ov = out_arr
    cdef double[::1] sums = np.empty(max(nv, 1))
    cdef double[::1] means = np.empty(max(nv, 1))
    cdef double[::1] comps = np.empty(max(nv, 1))
    cdef Py_ssize_t[::1] counts = np.empty(max(nv, 1), dtype=np.intp)
    cdef bint sorted_seg
    with nogil:
        for i in range(nx):
            j = 0
            while j < nv - 1:
                if sv[i, j + 1] - sv[i, j] > tv[i]:
                    j += 1
                    continue
                a = j
                while j < nv - 1 and sv[i, j + 1] - sv[i, j] <= tv[i]:
                    j += 1
                sorted_seg = True
                for k in range(a, j):
                    if gv[i, k + 1] < gv[i, k]:
                        sorted_seg = False
                        break
                if not sorted_seg:
                    _pava(&gv[i, a], &ov[i, a], j - a + 1, &sums[0], &comps[0], &means[0], &counts[0])
    return out_arr


def godunov_flux(ul, ur, fl, fr, sv, sf):
    """Godunov flux at each interface from sorted flux samples ``(sv, sf)``."""
    cdef double[::1] a = np.ascontiguousarray(ul, dtype=np.float64)
    cdef double[::1] b = np.ascontiguousarray(ur, dtype=np.float64)
    cdef double[::1] fa = np.ascontiguousarray(fl, dtype=np.float64)
    cdef double[::1] fb = np.ascontiguousarray(fr, dtype=np.float64)
    cdef double[::1] xs = np.ascontiguousarray(sv, dtype=np.float64)
    cdef double[::1] fs = np.ascontiguousarray(sf, dtype=np.float64)
    cdef Py_ssize_t n = a.shape[0], ns = xs.shape[0], k, lo_i, hi_i, mid, j
    out_arr = np.empty(n, dtype=np.float64)
    cdef double[::1] ov = out_arr
    cdef double lo, hi, val
    cdef bint take_min
    with nogil:
        for k in range(n):
            take_min = a[k] <= b[k]
            if take_min:
                lo = a[k]
                hi = b[k]
                val = fa[k] if fa[k] < fb[k] else fb[k]
            else:
                lo = b[k]
                hi = a[k]
                val = fa[k] if fa[k] > fb[k] else fb[k]
            # first sample >= lo
            lo_i = 0
            hi_i = ns
            while lo_i < hi_i:
                mid = (lo_i + hi_i) // 2
                if xs[mid] < lo:
                    lo_i = mid + 1
                else:
                    hi_i = mid
            j = lo_i
            while j < ns and xs[j] <= hi:
                if take_min:
                    if fs[j] < val:
                        val = fs[j]
                elif fs[j] > val:
                    val = fs[j]
                j += 1
            ov[k] = val
    return out_arr
