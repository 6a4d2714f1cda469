"""Pure-Python chain kernels.

Reference implementation of the hot loop behind the semi-hyperbolicity
scan.  ``_ckernels.pyx`` mirrors it statement for statement so the two
give bit-identical results; this module is used when the extension is not
built.
"""
import math
from bisect import bisect_left, bisect_right

import numpy as np

BISECT_STEPS = 80


class KernelMap:
    """Flat description of a MultimodalMap for the kernels.

    ``kind`` is 0 for piecewise affine (``p, s, v`` are breakpoints, slopes
    and values), 1 for a quadratic and 2 for a general polynomial
    (``coeffs`` ascending).
    """

    def __init__(self, kind, ends, vals, incr, crit, p, s, v, coeffs):
        self.kind = int(kind)
        self.ends = [float(e) for e in ends]
        self.vals = [float(e) for e in vals]
        self.incr = [bool(e) for e in incr]
        self.crit = [float(e) for e in crit]
        self.p = [float(e) for e in p]
        self.s = [float(e) for e in s]
        self.v = [float(e) for e in v]
        self.coeffs = [float(e) for e in coeffs]
        self.nlaps = len(self.ends) - 1
        if self.kind == 1:
            c0, c1, c2 = self.coeffs
            self.uc = -c1 / (2.0 * c2)
            self.top = c0 + self.uc * (c1 + self.uc * c2)
        else:
            self.uc = self.top = 0.0

    def f(self, x):
        if self.kind == 0:
            i = bisect_right(self.p, x) - 1
            i = min(max(i, 0), len(self.s) - 1)
            y = self.v[i] + self.s[i] * (x - self.p[i])
        else:
            c = self.coeffs
            y = c[-1]
            for k in range(len(c) - 2, -1, -1):
                y = y * x + c[k]
        return min(max(y, 0.0), 1.0)

    def _poly(self, x):
        c = self.coeffs
        y = c[-1]
        for k in range(len(c) - 2, -1, -1):
            y = y * x + c[k]
        return y

    def inv(self, k, y):
        """Inverse of f on lap k at a value y in the lap's image."""
        a, b = self.ends[k], self.ends[k + 1]
        if self.kind == 0:
            i0 = bisect_left(self.p, a)
            i1 = bisect_left(self.p, b)
            for j in range(i0, i1):
                lo, hi = self.v[j], self.v[j + 1]
                if (lo <= y <= hi) or (hi <= y <= lo):
                    return min(max(self.p[j] + (y - self.v[j]) / self.s[j], a), b)
            return a if (y - self.v[i0]) * (1.0 if self.incr[k] else -1.0) <= 0 else b
        if self.kind == 1:
            c0, c1, c2 = self.coeffs
            uc = self.uc
            d = math.sqrt(max((y - self.top) / c2, 0.0))
            q = (c0 - y) / c2
            if uc >= 0:
                big = uc + d
                small = q / big if big != 0 else uc - d
                left, right = small, big
            else:
                big = uc - d
                other = q / big if big != 0 else uc + d
                left, right = big, other
            root = left if b <= uc + 1e-15 else right
            return min(max(root, a), b)
        lo, hi = a, b
        sgn = 1.0 if self.incr[k] else -1.0
        for _ in range(BISECT_STEPS):
            mid = 0.5 * (lo + hi)
            if sgn * (self._poly(mid) - y) < 0:
                lo = mid
            else:
                hi = mid
        return 0.5 * (lo + hi)

    def lap_of(self, x):
        k = bisect_right(self.ends, x) - 1
        return min(max(k, 0), self.nlaps - 1)


def _inside(v, lo, hi):
    return (lo < v < hi) or (v == lo == 0.0) or (v == hi == 1.0)


def component(km, lo, hi, x):
    """Component of f^{-1}((lo, hi)) containing x, as (left, right, tie).

    ``tie`` is True when x is not strictly inside the computed component,
    i.e. it sits on (or round-off pushed it across) a boundary.
    """
    k = km.lap_of(x)
    j = k
    while True:
        val = km.vals[j]
        if _inside(val, lo, hi):
            if j == 0:
                left = 0.0
                break
            j -= 1
            continue
        left = km.inv(j, lo if val <= lo else hi)
        break
    j = k
    while True:
        val = km.vals[j + 1]
        if _inside(val, lo, hi):
            if j == km.nlaps - 1:
                right = 1.0
                break
            j += 1
            continue
        right = km.inv(j, lo if val <= lo else hi)
        break
    return left, right, not _inside(x, left, right)


def _hits(crit, left, right):
    for c in crit:
        if left < c < right:
            return True
    return False


def chain(km, orbit, m, lo, hi):
    """Pull (lo, hi) back along orbit[m-1], ..., orbit[0].

    Returns (lefts, rights, tie_index) with index j holding W_j; tie_index is
    -1 when no boundary tie occurred, otherwise the first j that tied (the
    arrays are then only filled for indices above it).
    """
    lefts = [0.0] * (m + 1)
    rights = [0.0] * (m + 1)
    lefts[m], rights[m] = lo, hi
    for j in range(m - 1, -1, -1):
        lo, hi, tie = component(km, lo, hi, orbit[j])
        if tie:
            return lefts, rights, j
        lefts[j], rights[j] = lo, hi
    return lefts, rights, -1


def orbit(km, x, n):
    out = [x]
    for _ in range(n):
        x = km.f(x)
        out.append(x)
    return out


def criticality_table(km, xs, n_max, r, crit):
    """counts[i, m] = criticality of f^m at xs[i] w.r.t. r; ties[i, m] flags a tie."""
    xs = np.asarray(xs, dtype=float)
    counts = np.zeros((len(xs), n_max + 1), dtype=np.int64)
    ties = np.zeros((len(xs), n_max + 1), dtype=bool)
    crit = [float(c) for c in crit]
    for i in range(len(xs)):
        o = orbit(km, float(xs[i]), n_max)
        for m in range(1, n_max + 1):
            y = o[m]
            lo, hi = max(y - r, 0.0), min(y + r, 1.0)
            cnt = 0
            for j in range(m - 1, -1, -1):
                lo, hi, tie = component(km, lo, hi, o[j])
                if tie:
                    ties[i, m] = True
                    break
                if _hits(crit, lo, hi):
                    cnt += 1
            counts[i, m] = cnt
    return counts, ties
