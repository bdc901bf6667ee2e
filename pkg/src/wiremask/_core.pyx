# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True, initializedcheck=False
"""Compiled evaluation kernels; contract identical to ``_core_py``."""

import numpy as np
from libc.stdint cimport int64_t, uint8_t
from libc.math cimport INFINITY


cdef inline double _min(double a, double b) noexcept nogil:
    return b if b < a else a


cdef inline double _max(double a, double b) noexcept nogil:
    return b if b > a else a


cdef inline Py_ssize_t _first_gt(const double[::1] a, double add, double t) noexcept nogil:
    # first index with a[i] + add > t (a ascending)
    cdef Py_ssize_t lo = 0, hi = a.shape[0], mid
    while lo < hi:
        mid = (lo + hi) >> 1
        if a[mid] + add > t:
            hi = mid
        else:
            lo = mid + 1
    return lo


cdef inline Py_ssize_t _first_ge(const double[::1] a, double t) noexcept nogil:
    cdef Py_ssize_t lo = 0, hi = a.shape[0], mid
    while lo < hi:
        mid = (lo + hi) >> 1
        if a[mid] >= t:
            hi = mid
        else:
            lo = mid + 1
    return lo


cdef void _free(const uint8_t[:, ::1] bitmap, int64_t[:, ::1] s, Py_ssize_t fw, Py_ssize_t fh,
                uint8_t[:, ::1] out) noexcept nogil:
    cdef Py_ssize_t m = bitmap.shape[0], i, j
    for i in range(m):
        for j in range(m):
            out[i, j] = 0
    if fw > m or fh > m:
        return
    for i in range(m + 1):
        s[i, 0] = 0
    for j in range(m + 1):
        s[0, j] = 0
    for i in range(m):
        for j in range(m):
            s[i + 1, j + 1] = bitmap[i, j] + s[i, j + 1] + s[i + 1, j] - s[i, j]
    for i in range(m - fw + 1):
        for j in range(m - fh + 1):
            if s[i + fw, j + fh] - s[i, j + fh] - s[i + fw, j] + s[i, j] == 0:
                out[i, j] = 1


cdef void _exact_free(const double[::1] xs, const double[::1] ys, double w, double h,
                      const double[::1] x0, const double[::1] y0,
                      const double[::1] x1, const double[::1] y1, Py_ssize_t n,
                      double tol, int64_t[:, ::1] diff, uint8_t[:, ::1] out) noexcept nogil:
    cdef Py_ssize_t m = xs.shape[0], i, j, r, ilo, ihi, jlo, jhi
    for i in range(m + 1):
        for j in range(m + 1):
            diff[i, j] = 0
    for r in range(n):
        ilo = _first_gt(xs, w, x0[r] + tol)
        ihi = _first_ge(xs, x1[r] - tol)
        jlo = _first_gt(ys, h, y0[r] + tol)
        jhi = _first_ge(ys, y1[r] - tol)
        if ilo < ihi and jlo < jhi:
            diff[ilo, jlo] += 1
            diff[ihi, jlo] -= 1
            diff[ilo, jhi] -= 1
            diff[ihi, jhi] += 1
    for i in range(m + 1):
        for j in range(1, m + 1):
            diff[i, j] += diff[i, j - 1]
    for i in range(1, m + 1):
        for j in range(m + 1):
            diff[i, j] += diff[i - 1, j]
    for i in range(m):
        for j in range(m):
            out[i, j] = 1 if diff[i, j] <= 0 else 0


def free_field(bitmap, Py_ssize_t fw, Py_ssize_t fh):
    cdef const uint8_t[:, ::1] b = np.ascontiguousarray(bitmap, dtype=np.uint8)
    cdef Py_ssize_t m = b.shape[0]
    out = np.empty((m, m), dtype=np.uint8)
    s = np.empty((m + 1, m + 1), dtype=np.int64)
    cdef uint8_t[:, ::1] o = out
    cdef int64_t[:, ::1] sv = s
    with nogil:
        _free(b, sv, fw, fh, o)
    return out


def exact_free_field(xs, ys, double w, double h, x0, y0, x1, y1, double tol):
    cdef const double[::1] xv = np.ascontiguousarray(xs, dtype=np.float64)
    cdef const double[::1] yv = np.ascontiguousarray(ys, dtype=np.float64)
    cdef const double[::1] a0 = np.ascontiguousarray(x0, dtype=np.float64)
    cdef const double[::1] b0 = np.ascontiguousarray(y0, dtype=np.float64)
    cdef const double[::1] a1 = np.ascontiguousarray(x1, dtype=np.float64)
    cdef const double[::1] b1 = np.ascontiguousarray(y1, dtype=np.float64)
    cdef Py_ssize_t m = xv.shape[0]
    out = np.empty((m, m), dtype=np.uint8)
    diff = np.empty((m + 1, m + 1), dtype=np.int64)
    cdef uint8_t[:, ::1] o = out
    cdef int64_t[:, ::1] d = diff
    with nogil:
        _exact_free(xv, yv, w, h, a0, b0, a1, b1, a0.shape[0], tol, d, o)
    return out


def axis_cost(lo, hi, has, omin, omax, coords):
    cdef const double[::1] l = np.ascontiguousarray(lo, dtype=np.float64)
    cdef const double[::1] u = np.ascontiguousarray(hi, dtype=np.float64)
    cdef const uint8_t[::1] hv = np.ascontiguousarray(has, dtype=np.uint8)
    cdef const double[::1] a = np.ascontiguousarray(omin, dtype=np.float64)
    cdef const double[::1] b = np.ascontiguousarray(omax, dtype=np.float64)
    cdef const double[::1] c = np.ascontiguousarray(coords, dtype=np.float64)
    out = np.zeros(c.shape[0])
    cdef double[::1] o = out
    cdef Py_ssize_t t, i
    cdef double own
    with nogil:
        for t in range(l.shape[0]):
            if hv[t]:
                for i in range(c.shape[0]):
                    o[i] += _max(u[t], c[i] + b[t]) - _min(l[t], c[i] + a[t]) - (u[t] - l[t])
            else:
                own = b[t] - a[t]
                for i in range(c.shape[0]):
                    o[i] += own
    return out


def greedy_place(order, gx, gy, mw, mh, fw, fh, xs, ys, double canvas_w, double canvas_h,
                 mptr, mnet, oxmin, oxmax, oymin, oymax,
                 blx, bhx, bly, bhy, bhas, bint exact, double geo_tol, double delta_tol):
    cdef const int64_t[::1] ordv = np.ascontiguousarray(order, dtype=np.int64)
    cdef const double[::1] gxv = np.ascontiguousarray(gx, dtype=np.float64)
    cdef const double[::1] gyv = np.ascontiguousarray(gy, dtype=np.float64)
    cdef const double[::1] mwv = np.ascontiguousarray(mw, dtype=np.float64)
    cdef const double[::1] mhv = np.ascontiguousarray(mh, dtype=np.float64)
    cdef const int64_t[::1] fwv = np.ascontiguousarray(fw, dtype=np.int64)
    cdef const int64_t[::1] fhv = np.ascontiguousarray(fh, dtype=np.int64)
    cdef const double[::1] xv = np.ascontiguousarray(xs, dtype=np.float64)
    cdef const double[::1] yv = np.ascontiguousarray(ys, dtype=np.float64)
    cdef const int64_t[::1] ptr = np.ascontiguousarray(mptr, dtype=np.int64)
    cdef const int64_t[::1] net = np.ascontiguousarray(mnet, dtype=np.int64)
    cdef const double[::1] axn = np.ascontiguousarray(oxmin, dtype=np.float64)
    cdef const double[::1] axx = np.ascontiguousarray(oxmax, dtype=np.float64)
    cdef const double[::1] ayn = np.ascontiguousarray(oymin, dtype=np.float64)
    cdef const double[::1] ayx = np.ascontiguousarray(oymax, dtype=np.float64)
    # boxes are updated in place and must already be contiguous of the right dtype
    cdef double[::1] lx = blx
    cdef double[::1] hx = bhx
    cdef double[::1] ly = bly
    cdef double[::1] hy = bhy
    cdef uint8_t[::1] has = bhas

    cdef Py_ssize_t k = ordv.shape[0], m = xv.shape[0]
    ai = np.full(k, -1, dtype=np.int64)
    aj = np.full(k, -1, dtype=np.int64)
    incr = np.zeros(k)
    cdef int64_t[::1] aiv = ai
    cdef int64_t[::1] ajv = aj
    cdef double[::1] inc = incr

    bitmap_a = np.zeros((m, m), dtype=np.uint8)
    valid_a = np.empty((m, m), dtype=np.uint8)
    work_a = np.empty((m + 1, m + 1), dtype=np.int64)
    cdef uint8_t[:, ::1] bitmap = bitmap_a
    cdef uint8_t[:, ::1] valid = valid_a
    cdef int64_t[:, ::1] work = work_a
    vec = np.empty((4, m))
    cdef double[:, ::1] vv = vec
    rect = np.empty((4, k))
    cdef double[:, ::1] rv = rect

    cdef Py_ssize_t step, v, i, j, t, n, s, e, bi, bj, placed = k
    cdef double w, h, dmin, thr, d, best, x, y, p0, p1, q0, q1, own
    cdef bint any_valid

    with nogil:
        for step in range(k):
            v = ordv[step]
            w = mwv[v]
            h = mhv[v]
            if exact:
                _exact_free(xv, yv, w, h, rv[0, :step], rv[1, :step], rv[2, :step], rv[3, :step],
                            step, geo_tol, work, valid)
            else:
                _free(bitmap, work, fwv[v], fhv[v], valid)
            any_valid = False
            for i in range(m):
                if not (xv[i] + w <= canvas_w + geo_tol):
                    for j in range(m):
                        valid[i, j] = 0
                    continue
                for j in range(m):
                    if valid[i, j] and not (yv[j] + h <= canvas_h + geo_tol):
                        valid[i, j] = 0
                    if valid[i, j]:
                        any_valid = True
            if not any_valid:
                placed = step
                break

            s = ptr[v]
            e = ptr[v + 1]
            for i in range(m):
                vv[0, i] = 0.0
                vv[1, i] = 0.0
            for t in range(s, e):
                n = net[t]
                if has[n]:
                    for i in range(m):
                        vv[0, i] += _max(hx[n], xv[i] + axx[t]) - _min(lx[n], xv[i] + axn[t]) - (hx[n] - lx[n])
                        vv[1, i] += _max(hy[n], yv[i] + ayx[t]) - _min(ly[n], yv[i] + ayn[t]) - (hy[n] - ly[n])
                else:
                    own = axx[t] - axn[t]
                    for i in range(m):
                        vv[0, i] += own
                    own = ayx[t] - ayn[t]
                    for i in range(m):
                        vv[1, i] += own
            for i in range(m):
                d = xv[i] - gxv[v]
                vv[2, i] = d * d
                d = yv[i] - gyv[v]
                vv[3, i] = d * d

            dmin = INFINITY
            for i in range(m):
                for j in range(m):
                    if valid[i, j]:
                        d = vv[0, i] + vv[1, j]
                        if d < dmin:
                            dmin = d
            thr = dmin + delta_tol
            best = INFINITY
            bi = -1
            bj = -1
            for j in range(m):
                for i in range(m):
                    if valid[i, j] and vv[0, i] + vv[1, j] <= thr:
                        d = vv[2, i] + vv[3, j]
                        if d < best:
                            best = d
                            bi = i
                            bj = j
            aiv[v] = bi
            ajv[v] = bj
            inc[step] = vv[0, bi] + vv[1, bj]

            x = xv[bi]
            y = yv[bj]
            for t in range(s, e):
                n = net[t]
                p0 = x + axn[t]
                p1 = x + axx[t]
                q0 = y + ayn[t]
                q1 = y + ayx[t]
                if has[n]:
                    lx[n] = _min(lx[n], p0)
                    hx[n] = _max(hx[n], p1)
                    ly[n] = _min(ly[n], q0)
                    hy[n] = _max(hy[n], q1)
                else:
                    lx[n] = p0
                    hx[n] = p1
                    ly[n] = q0
                    hy[n] = q1
                    has[n] = 1
            for i in range(bi, min(bi + fwv[v], m)):
                for j in range(bj, min(bj + fhv[v], m)):
                    bitmap[i, j] = 1
            rv[0, step] = x
            rv[1, step] = y
            rv[2, step] = x + w
            rv[3, step] = y + h
    return ai, aj, incr, placed
