# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True
"""Compiled chain kernels.

Statement-for-statement mirror of ``_kernels_py``; any change there must be
made here too (tests compare the two bit for bit).
"""
from libc.math cimport sqrt

import numpy as np

cimport numpy as cnp

cnp.import_array()

DEF BISECT_STEPS = 80


cdef inline bint _inside(double v, double lo, double hi) noexcept nogil:
    return (lo < v and v < hi) or (v == lo and lo == 0.0) or (v == hi and hi == 1.0)


cdef inline Py_ssize_t _bisect_right(double[::1] seq, double x) noexcept nogil:
    cdef Py_ssize_t lo = 0, hi = seq.shape[0], mid
    while lo < hi:
        mid = (lo + hi) // 2
        if x < seq[mid]:
            hi = mid
        else:
            lo = mid + 1
    return lo


cdef inline Py_ssize_t _bisect_left(double[::1] seq, double x) noexcept nogil:
    cdef Py_ssize_t lo = 0, hi = seq.shape[0], mid
    while lo < hi:
        mid = (lo + hi) // 2
        if seq[mid] < x:
            lo = mid + 1
        else:
            hi = mid
    return lo


cdef class KernelMap:
    """Flat description of a MultimodalMap for the kernels (see ``_kernels_py``)."""

    cdef public int kind
    cdef public Py_ssize_t nlaps
    cdef double[::1] ends, vals, crit, p, s, v, coeffs
    cdef unsigned char[::1] incr
    cdef double uc, top

    def __init__(self, kind, ends, vals, incr, crit, p, s, v, coeffs):
        self.kind = int(kind)
        self.ends = np.ascontiguousarray(ends, dtype=np.float64)
        self.vals = np.ascontiguousarray(vals, dtype=np.float64)
        self.incr = np.ascontiguousarray(incr, dtype=np.uint8)
        self.crit = np.ascontiguousarray(crit, dtype=np.float64)
        self.p = np.ascontiguousarray(p, dtype=np.float64)
        self.s = np.ascontiguousarray(s, dtype=np.float64)
        self.v = np.ascontiguousarray(v, dtype=np.float64)
        self.coeffs = np.ascontiguousarray(coeffs, dtype=np.float64)
        self.nlaps = self.ends.shape[0] - 1
        cdef double c0, c1, c2
        if self.kind == 1:
            c0, c1, c2 = self.coeffs[0], self.coeffs[1], self.coeffs[2]
            self.uc = -c1 / (2.0 * c2)
            self.top = c0 + self.uc * (c1 + self.uc * c2)
        else:
            self.uc = 0.0
            self.top = 0.0

    cdef double _poly(self, double x) noexcept nogil:
        cdef Py_ssize_t k, n = self.coeffs.shape[0]
        cdef double y = self.coeffs[n - 1]
        for k in range(n - 2, -1, -1):
            y = y * x + self.coeffs[k]
        return y

    cdef double _f(self, double x) noexcept nogil:
        cdef Py_ssize_t i
        cdef double y
        if self.kind == 0:
            i = _bisect_right(self.p, x) - 1
            i = min(max(i, 0), self.s.shape[0] - 1)
            y = self.v[i] + self.s[i] * (x - self.p[i])
        else:
            y = self._poly(x)
        return min(max(y, 0.0), 1.0)

    cdef double _inv(self, Py_ssize_t k, double y) noexcept nogil:
        cdef double a = self.ends[k], b = self.ends[k + 1]
        cdef Py_ssize_t i0, i1, j, it
        cdef double lo, hi, d, q, big, left, right, root, mid, sgn
        if self.kind == 0:
            i0 = _bisect_left(self.p, a)
            i1 = _bisect_left(self.p, b)
            for j in range(i0, i1):
                lo = self.v[j]
                hi = self.v[j + 1]
                if (lo <= y and y <= hi) or (hi <= y and y <= lo):
                    return min(max(self.p[j] + (y - self.v[j]) / self.s[j], a), b)
            sgn = 1.0 if self.incr[k] else -1.0
            return a if (y - self.v[i0]) * sgn <= 0 else b
        if self.kind == 1:
            d = sqrt(max((y - self.top) / self.coeffs[2], 0.0))
            q = (self.coeffs[0] - y) / self.coeffs[2]
            if self.uc >= 0:
                big = self.uc + d
                left = q / big if big != 0 else self.uc - d
                right = big
            else:
                big = self.uc - d
                left = big
                right = q / big if big != 0 else self.uc + d
            root = left if b <= self.uc + 1e-15 else right
            return min(max(root, a), b)
        lo = a
        hi = b
        sgn = 1.0 if self.incr[k] else -1.0
        for it in range(BISECT_STEPS):
            mid = 0.5 * (lo + hi)
            if sgn * (self._poly(mid) - y) < 0:
                lo = mid
            else:
                hi = mid
        return 0.5 * (lo + hi)

    cdef Py_ssize_t _lap_of(self, double x) noexcept nogil:
        cdef Py_ssize_t k = _bisect_right(self.ends, x) - 1
        return min(max(k, 0), self.nlaps - 1)

    cdef bint _component(self, double lo, double hi, double x, double* left, double* right) noexcept nogil:
        cdef Py_ssize_t k = self._lap_of(x), j
        cdef double val
        j = k
        while True:
            val = self.vals[j]
            if _inside(val, lo, hi):
                if j == 0:
                    left[0] = 0.0
                    break
                j -= 1
                continue
            left[0] = self._inv(j, lo if val <= lo else hi)
            break
        j = k
        while True:
            val = self.vals[j + 1]
            if _inside(val, lo, hi):
                if j == self.nlaps - 1:
                    right[0] = 1.0
                    break
                j += 1
                continue
            right[0] = self._inv(j, lo if val <= lo else hi)
            break
        return not _inside(x, left[0], right[0])

    cdef bint _hits(self, double left, double right) noexcept nogil:
        cdef Py_ssize_t i
        for i in range(self.crit.shape[0]):
            if left < self.crit[i] and self.crit[i] < right:
                return True
        return False

    # python-visible wrappers, same names as the fallback
    def f(self, double x):
        return self._f(x)

    def inv(self, Py_ssize_t k, double y):
        return self._inv(k, y)

    def lap_of(self, double x):
        return self._lap_of(x)


def component(KernelMap km, double lo, double hi, double x):
    cdef double left = 0.0, right = 0.0
    cdef bint tie = km._component(lo, hi, x, &left, &right)
    return left, right, bool(tie)


def orbit(KernelMap km, double x, int n):
    out = [x]
    cdef int i
    for i in range(n):
        x = km._f(x)
        out.append(x)
    return out


def chain(KernelMap km, orbit, int m, double lo, double hi):
    cdef double left = 0.0, right = 0.0
    cdef int j
    lefts = [0.0] * (m + 1)
    rights = [0.0] * (m + 1)
    lefts[m] = lo
    rights[m] = hi
    for j in range(m - 1, -1, -1):
        if km._component(lo, hi, orbit[j], &left, &right):
            return lefts, rights, j
        lo = left
        hi = right
        lefts[j] = lo
        rights[j] = hi
    return lefts, rights, -1


def criticality_table(KernelMap km, xs, int n_max, double r, crit):
    cdef double[::1] xv = np.ascontiguousarray(xs, dtype=np.float64)
    cdef Py_ssize_t n = xv.shape[0], i
    cdef int m, j, cnt
    cdef double lo, hi, left = 0.0, right = 0.0, y
    counts_arr = np.zeros((n, n_max + 1), dtype=np.int64)
    ties_arr = np.zeros((n, n_max + 1), dtype=np.uint8)
    cdef long long[:, ::1] counts = counts_arr
    cdef unsigned char[:, ::1] ties = ties_arr
    cdef double[::1] o = np.empty(n_max + 1, dtype=np.float64)
    cdef double[::1] saved = km.crit
    km.crit = np.ascontiguousarray(crit, dtype=np.float64)
    try:
        with nogil:
            for i in range(n):
                o[0] = xv[i]
                for m in range(1, n_max + 1):
                    o[m] = km._f(o[m - 1])
                for m in range(1, n_max + 1):
                    y = o[m]
                    lo = max(y - r, 0.0)
                    hi = min(y + r, 1.0)
                    cnt = 0
                    for j in range(m - 1, -1, -1):
                        if km._component(lo, hi, o[j], &left, &right):
                            ties[i, m] = 1
                            break
                        lo = left
                        hi = right
                        if km._hits(lo, hi):
                            cnt += 1
                    counts[i, m] = cnt
    finally:
        km.crit = saved
    return counts_arr, ties_arr.astype(bool)
