"""Closed-form multimodal maps of the unit interval.

A :class:`MultimodalMap` is built from a family descriptor (tent, logistic,
polynomial, piecewise-affine) rather than an arbitrary callable, so that
derivatives, critical orders and branch inverses are exact or controlled.

Every interval in this package is a relatively open subset of I = [0, 1]:
an endpoint at 0 or 1 is included, any other endpoint is excluded.  Length
and measure computations ignore openness altogether.
"""
from __future__ import annotations

import bisect
from dataclasses import dataclass

import numpy as np

from .errors import DomainError, GuardExceeded, NonDifferentiableError

LAP_GUARD = 10**7
INVERSION_TOL = 1e-12
_BISECT_STEPS = 80


@dataclass(frozen=True)
class IntervalQ:
    """Subinterval of [0, 1] with per-endpoint openness flags."""

    lo: float
    hi: float
    lo_open: bool | None = None
    hi_open: bool | None = None

    def __post_init__(self):
        lo, hi = float(self.lo), float(self.hi)
        if not (0.0 <= lo <= hi <= 1.0):
            raise DomainError(f"interval ({lo}, {hi}) not inside [0, 1]")
        object.__setattr__(self, "lo", lo)
        object.__setattr__(self, "hi", hi)
        if self.lo_open is None:
            object.__setattr__(self, "lo_open", lo > 0.0)
        if self.hi_open is None:
            object.__setattr__(self, "hi_open", hi < 1.0)

    @classmethod
    def ball(cls, x, r):
        """B_I(x, r) = {y in I : |x - y| < r}."""
        return cls(max(0.0, x - r), min(1.0, x + r))

    @property
    def length(self):
        return self.hi - self.lo

    @property
    def midpoint(self):
        return 0.5 * (self.lo + self.hi)

    @property
    def is_empty(self):
        return self.hi <= self.lo

    def contains(self, x):
        if self.is_empty:
            return False
        if self.lo < x < self.hi:
            return True
        return (x == self.lo and not self.lo_open) or (x == self.hi and not self.hi_open)

    def contains_point_interior(self, x):
        return self.lo < x < self.hi

    def scaled(self, eta):
        """The interval with the same midpoint and length (1 + 2*eta)|J|, clipped to I."""
        half = 0.5 * (1.0 + 2.0 * eta) * self.length
        return IntervalQ(max(0.0, self.midpoint - half), min(1.0, self.midpoint + half))

    def __contains__(self, x):
        return self.contains(x)

    def __repr__(self):
        left = "(" if self.lo_open else "["
        right = ")" if self.hi_open else "]"
        return f"{left}{self.lo:.12g}, {self.hi:.12g}{right}"


@dataclass(frozen=True)
class CriticalPoint:
    location: float
    order: float
    is_turning: bool = True


def _inside(v, lo, hi):
    """Membership of a value in the relatively open interval (lo, hi) of I."""
    return (lo < v < hi) or (v == lo == 0.0) or (v == hi == 1.0)


class _Affine:
    """Continuous piecewise-affine map given by breakpoints and slopes."""

    kind = "affine"

    def __init__(self, breakpoints, slopes, f0):
        p = np.asarray([0.0, *breakpoints, 1.0], dtype=float)
        s = np.asarray(slopes, dtype=float)
        if len(s) != len(p) - 1:
            raise DomainError("piecewise_affine needs one slope per piece")
        if np.any(np.diff(p) <= 0):
            raise DomainError("breakpoints must be strictly increasing inside (0, 1)")
        if np.any(s == 0):
            raise DomainError("zero slope: map is not piecewise injective")
        v = np.empty_like(p)
        v[0] = f0
        for i in range(len(s)):
            v[i + 1] = v[i] + s[i] * (p[i + 1] - p[i])
        # snap round-off at the unit interval's ends
        v[np.abs(v) < 1e-13] = 0.0
        v[np.abs(v - 1.0) < 1e-13] = 1.0
        self.p, self.s, self.v = p, s, v
        self._pl, self._sl, self._vl = p.tolist(), s.tolist(), v.tolist()

    def turning_points(self):
        return [self._pl[i] for i in range(1, len(self._sl)) if self._sl[i - 1] * self._sl[i] < 0]

    def critical_points(self):
        return [(t, 1.0, True) for t in self.turning_points()]

    def evaluate(self, x):
        i = np.clip(np.searchsorted(self.p, x, side="right") - 1, 0, len(self.s) - 1)
        return self.v[i] + self.s[i] * (x - self.p[i])

    def eval1(self, x):
        i = min(max(bisect.bisect_right(self._pl, x) - 1, 0), len(self._sl) - 1)
        return self._vl[i] + self._sl[i] * (x - self._pl[i])

    def deriv1(self, x):
        if x in self._pl[1:-1]:
            raise NonDifferentiableError(f"breakpoint at x={x}")
        i = min(max(bisect.bisect_right(self._pl, x) - 1, 0), len(self._sl) - 1)
        return self._sl[i]

    def derivative(self, x):
        i = np.clip(np.searchsorted(self.p, x, side="right") - 1, 0, len(self.s) - 1)
        return self.s[i]

    def _pieces(self, a, b):
        i0 = bisect.bisect_left(self._pl, a)
        i1 = bisect.bisect_left(self._pl, b)
        return i0, i1

    def inverse(self, a, b, increasing, y):
        i0, i1 = self._pieces(a, b)
        vals = self.v[i0:i1 + 1]
        y = np.asarray(y, dtype=float)
        if increasing:
            k = np.clip(np.searchsorted(vals, y, side="right") - 1, 0, i1 - i0 - 1)
        else:
            k = np.clip(np.searchsorted(-vals, -y, side="right") - 1, 0, i1 - i0 - 1)
        j = i0 + k
        return np.clip(self.p[j] + (y - self.v[j]) / self.s[j], a, b)

    def inverse1(self, a, b, increasing, y):
        i0, i1 = self._pieces(a, b)
        for j in range(i0, i1):
            lo, hi = self._vl[j], self._vl[j + 1]
            if (lo <= y <= hi) or (hi <= y <= lo):
                return min(max(self._pl[j] + (y - self._vl[j]) / self._sl[j], a), b)
        return a if (y - self._vl[i0]) * (1 if increasing else -1) <= 0 else b


class _Poly:
    """Polynomial map with ascending power-basis coefficients."""

    kind = "poly"

    def __init__(self, coeffs):
        c = np.trim_zeros(np.asarray(coeffs, dtype=float), "b")
        if len(c) < 3:
            raise DomainError("a polynomial multimodal map needs degree >= 2")
        self.c = c
        self.dc = np.polynomial.polynomial.polyder(c)
        self._cl = c.tolist()
        self._dcl = self.dc.tolist()

    def critical_points(self, cluster_tol=1e-4):
        roots = np.polynomial.polynomial.polyroots(self.dc)
        real = sorted(r.real for r in roots if abs(r.imag) < 1e-7)
        groups = []
        for r in real:
            if groups and r - groups[-1][-1] < cluster_tol:
                groups[-1].append(r)
            else:
                groups.append([r])
        out = []
        for g in groups:
            c = float(np.mean(g))
            if 1e-12 < c < 1.0 - 1e-12:
                mult = len(g)
                out.append((c, 1.0 + mult, mult % 2 == 1))
        return out

    def evaluate(self, x):
        x = np.asarray(x, dtype=float)
        acc = np.full(x.shape, self._cl[-1])
        for a in reversed(self._cl[:-1]):
            acc = acc * x + a
        return acc

    def eval1(self, x):
        acc = self._cl[-1]
        for a in reversed(self._cl[:-1]):
            acc = acc * x + a
        return acc

    def deriv1(self, x):
        acc = self._dcl[-1]
        for a in reversed(self._dcl[:-1]):
            acc = acc * x + a
        return acc

    def derivative(self, x):
        x = np.asarray(x, dtype=float)
        acc = np.full(x.shape, self._dcl[-1])
        for a in reversed(self._dcl[:-1]):
            acc = acc * x + a
        return acc

    def _quadratic_roots(self, y):
        c0, c1, c2 = self._cl
        uc = -c1 / (2.0 * c2)
        top = c0 + uc * (c1 + uc * c2)
        d = np.sqrt(np.maximum((y - top) / c2, 0.0))
        p = (c0 - y) / c2
        if uc >= 0:
            big = uc + d
            with np.errstate(divide="ignore", invalid="ignore"):
                small = np.where(big != 0, p / np.where(big != 0, big, 1.0), uc - d)
            return small, big
        big = uc - d
        with np.errstate(divide="ignore", invalid="ignore"):
            other = np.where(big != 0, p / np.where(big != 0, big, 1.0), uc + d)
        return big, other

    def inverse(self, a, b, increasing, y):
        y = np.asarray(y, dtype=float)
        if len(self._cl) == 3:
            left, right = self._quadratic_roots(y)
            uc = -self._cl[1] / (2.0 * self._cl[2])
            root = left if b <= uc + 1e-15 else right
            return np.clip(root, a, b)
        lo = np.full(y.shape, float(a))
        hi = np.full(y.shape, float(b))
        sgn = 1.0 if increasing else -1.0
        for _ in range(_BISECT_STEPS):
            mid = 0.5 * (lo + hi)
            below = sgn * (self.evaluate(mid) - y) < 0
            lo = np.where(below, mid, lo)
            hi = np.where(below, hi, mid)
        return 0.5 * (lo + hi)

    def inverse1(self, a, b, increasing, y):
        if len(self._cl) == 3:
            left, right = self._quadratic_roots(np.asarray(y, dtype=float))
            uc = -self._cl[1] / (2.0 * self._cl[2])
            root = float(left) if b <= uc + 1e-15 else float(right)
            return min(max(root, a), b)
        lo, hi = a, b
        sgn = 1.0 if increasing else -1.0
        for _ in range(_BISECT_STEPS):
            mid = 0.5 * (lo + hi)
            if mid == lo or mid == hi:
                break
            if sgn * (self.eval1(mid) - y) < 0:
                lo = mid
            else:
                hi = mid
        return 0.5 * (lo + hi)


class MultimodalMap:
    """A piecewise-monotone self-map of [0, 1] with its critical data.

    Build one with :meth:`tent`, :meth:`logistic`, :meth:`polynomial`,
    :meth:`piecewise_affine` or :meth:`from_descriptor`.  Instances are
    immutable and safe to share between workers.

    Logistic maps ``a x (1 - x)`` with ``a < 4`` are restricted to their
    dynamical core ``[f^2(c), f(c)]`` and rescaled affinely onto [0, 1];
    the result is a quadratic polynomial in the new coordinate.
    """

    def __init__(self, family, params, impl, critical_orders=None, core=None):
        # use the classmethod constructors; this signature is internal
        self.family = family
        self.params = tuple(float(p) for p in params)
        self.core = core
        self._impl = impl
        found = impl.critical_points()
        if critical_orders is not None:
            if len(critical_orders) != len(found):
                raise DomainError(
                    f"critical_orders has {len(critical_orders)} entries, map has {len(found)} critical points"
                )
            found = [(c, float(o), t) for (c, _, t), o in zip(found, critical_orders)]
        self.critical_orders_override = None if critical_orders is None else tuple(map(float, critical_orders))
        self.critical_points = tuple(CriticalPoint(c, o, t) for c, o, t in found)
        if not self.critical_points:
            raise DomainError("map has no critical points in (0, 1): not multimodal")
        self.turning_points = tuple(cp.location for cp in self.critical_points if cp.is_turning)
        if not self.turning_points:
            raise DomainError("map has no turning point: not multimodal")
        orders = [cp.order for cp in self.critical_points]
        self.lmax, self.lmin = max(orders), min(orders)
        ends = np.array([0.0, *self.turning_points, 1.0])
        self.lap_ends = ends
        self.lap_values = np.clip(impl.evaluate(ends), 0.0, 1.0)
        self.lap_increasing = np.diff(self.lap_values) > 0
        self._ends = ends.tolist()
        self._vals = self.lap_values.tolist()
        self._incr = self.lap_increasing.tolist()
        img = self.image_interval(IntervalQ(0.0, 1.0))
        raw = self._raw_extremes()
        if raw[0] < -1e-12 or raw[1] > 1.0 + 1e-12:
            raise DomainError(f"map does not send [0,1] into itself: image {raw}")
        self.range = img

    # construction -------------------------------------------------------
    @classmethod
    def tent(cls, slope=2.0):
        if slope <= 1.0 or slope > 2.0:
            raise DomainError("tent slope must lie in (1, 2]")
        return cls("tent", [slope], _Affine([0.5], [slope, -slope], 0.0))

    @classmethod
    def logistic(cls, a=4.0):
        if not 2.0 < a <= 4.0:
            raise DomainError("logistic parameter must lie in (2, 4]")
        if a == 4.0:
            return cls("logistic", [a], _Poly([0.0, 4.0, -4.0]))
        v = a / 4.0
        low = a * v * (1.0 - v)
        w = v - low
        coeffs = [
            (a * low * (1.0 - low) - low) / w,
            a * (1.0 - 2.0 * low),
            -a * w,
        ]
        return cls("logistic", [a], _Poly(coeffs), core=(low, v))

    @classmethod
    def polynomial(cls, coeffs, critical_orders=None):
        return cls("polynomial", coeffs, _Poly(coeffs), critical_orders)

    @classmethod
    def piecewise_affine(cls, breakpoints, slopes, f0=0.0, critical_orders=None):
        params = [f0]
        for i, s in enumerate(slopes):
            if i:
                params.append(breakpoints[i - 1])
            params.append(s)
        return cls("piecewise_affine", params, _Affine(breakpoints, slopes, f0), critical_orders)

    @classmethod
    def from_descriptor(cls, family, params, critical_orders=None):
        """Build from the config triple (family, params, critical_orders).

        ``piecewise_affine`` params interleave ``[f(0), s0, b1, s1, b2, s2, ...]``.
        """
        params = [float(p) for p in params]
        if family == "tent":
            m = cls.tent(*params)
        elif family == "logistic":
            m = cls.logistic(*params)
        elif family == "polynomial":
            return cls.polynomial(params, critical_orders)
        elif family == "piecewise_affine":
            if len(params) < 4 or len(params) % 2:
                raise DomainError("piecewise_affine params: [f0, s0, b1, s1, ...]")
            f0, rest = params[0], params[1:]
            return cls.piecewise_affine(rest[1::2], rest[0::2], f0, critical_orders)
        else:
            raise DomainError(f"unknown family {family!r}")
        if critical_orders is not None:
            m = cls(m.family, m.params, m._impl, critical_orders, m.core)
        return m

    def descriptor(self):
        d = {"family": self.family, "params": list(self.params)}
        if self.critical_orders_override is not None:
            d["critical_orders"] = list(self.critical_orders_override)
        return d

    def __repr__(self):
        return f"MultimodalMap({self.family}, {list(self.params)})"

    # evaluation ---------------------------------------------------------
    @property
    def kind(self):
        return self._impl.kind

    def eval(self, x):
        """f(x) for a scalar x in [0, 1]."""
        if not 0.0 <= x <= 1.0:
            raise DomainError(f"x={x} outside [0, 1]")
        return min(max(self._impl.eval1(x), 0.0), 1.0)

    def evaluate(self, x):
        """Vectorised f on an array of points of [0, 1]."""
        return np.clip(self._impl.evaluate(np.asarray(x, dtype=float)), 0.0, 1.0)

    __call__ = evaluate

    def iterate(self, x, n):
        x = np.asarray(x, dtype=float)
        for _ in range(n):
            x = self.evaluate(x)
        return x

    def orbit(self, x, n):
        """[x, f(x), ..., f^n(x)] as a list of floats."""
        out = [float(x)]
        for _ in range(n):
            out.append(self.eval(out[-1]))
        return out

    def deriv(self, x):
        if not 0.0 <= x <= 1.0:
            raise DomainError(f"x={x} outside [0, 1]")
        return float(self._impl.deriv1(x))

    def derivative(self, x):
        return self._impl.derivative(np.asarray(x, dtype=float))

    def deriv_iterate(self, x, n):
        """|Df^n| along orbits of an array of points (chain rule)."""
        x = np.asarray(x, dtype=float)
        d = np.ones_like(x)
        for _ in range(n):
            d = d * np.abs(self.derivative(x))
            x = self.evaluate(x)
        return d

    def lap_index(self, x):
        return min(max(bisect.bisect_right(self._ends, x) - 1, 0), len(self._ends) - 2)

    def inverse_branch(self, lap, y):
        """Vectorised inverse of f restricted to lap number ``lap``."""
        a, b = self._ends[lap], self._ends[lap + 1]
        return self._impl.inverse(a, b, self._incr[lap], y)

    def inverse1(self, lap, y):
        a, b = self._ends[lap], self._ends[lap + 1]
        return self._impl.inverse1(a, b, self._incr[lap], y)

    # intervals ----------------------------------------------------------
    def _raw_extremes(self):
        pts = np.array([0.0, *[cp.location for cp in self.critical_points], 1.0])
        vals = self._impl.evaluate(pts)
        return float(vals.min()), float(vals.max())

    def image_interval(self, J):
        """f(J): extremes of f over J's endpoints and turning points inside J."""
        if J.is_empty:
            raise DomainError("image of an empty interval")
        pts = [J.lo, J.hi] + [t for t in self.turning_points if J.lo < t < J.hi]
        vals = [self.eval(p) for p in pts]
        return IntervalQ(min(vals), max(vals))

    def image_intervals(self, lo, hi):
        """Vectorised :meth:`image_interval` for arrays of closed intervals."""
        lo = np.asarray(lo, dtype=float)
        hi = np.asarray(hi, dtype=float)
        vlo, vhi = self.evaluate(lo), self.evaluate(hi)
        out_lo, out_hi = np.minimum(vlo, vhi), np.maximum(vlo, vhi)
        for t in self.turning_points:
            inside = (lo < t) & (t < hi)
            ft = self.eval(t)
            out_lo = np.where(inside, np.minimum(out_lo, ft), out_lo)
            out_hi = np.where(inside, np.maximum(out_hi, ft), out_hi)
        return out_lo, out_hi

    def branch_preimages(self, J):
        """All connected components of f^{-1}(J), in increasing order."""
        if J.is_empty:
            return []
        pieces = []
        for k in range(len(self._ends) - 1):
            a, b = self._ends[k], self._ends[k + 1]
            va, vb = self._vals[k], self._vals[k + 1]
            lo_img, hi_img = min(va, vb), max(va, vb)
            lo, hi = max(J.lo, lo_img), min(J.hi, hi_img)
            if hi < lo or (hi == lo and not J.contains(lo)):
                continue
            xa = a if J.contains(va) else self.inverse1(k, J.lo if va <= J.lo else J.hi)
            xb = b if J.contains(vb) else self.inverse1(k, J.lo if vb <= J.lo else J.hi)
            if xb <= xa:
                continue
            pieces.append([xa, xb])
        merged = []
        for piece in pieces:
            if merged and merged[-1][1] == piece[0]:
                merged[-1][1] = piece[1]
            else:
                merged.append(piece)
        return [IntervalQ(a, b) for a, b in merged]

    # laps ---------------------------------------------------------------
    def iter_lap_partitions(self, n_max, guard=LAP_GUARD):
        """Yield ``(n, ends, values)`` for the laps of f^n, n = 1 .. n_max.

        The turning points of f^{k+1} are the turning points of f together
        with the f-preimages of the turning points of f^k, so each level is
        one vectorised branch inversion of the previous one.
        """
        ends, vals = self.lap_ends.copy(), self.lap_values.copy()
        turning = np.array(self.turning_points)
        yield 1, ends, vals
        for k in range(1, n_max):
            inner, inner_vals = ends[1:-1], vals[1:-1]
            pts = [turning]
            pvals = [self.iterate(turning, k + 1)]
            for lap in range(len(self._ends) - 1):
                lo = min(self._vals[lap], self._vals[lap + 1])
                hi = max(self._vals[lap], self._vals[lap + 1])
                mask = (inner > lo) & (inner < hi)
                pts.append(self.inverse_branch(lap, inner[mask]))
                pvals.append(inner_vals[mask])
            x = np.concatenate(pts)
            if len(x) + 1 > guard:
                raise GuardExceeded(f"f^{k + 1} has more than {guard} laps")
            v = np.concatenate(pvals)
            order = np.argsort(x, kind="stable")
            x, v = x[order], v[order]
            keep = np.ones(len(x), dtype=bool)
            keep[1:] = np.diff(x) > 0
            keep &= (x > 0.0) & (x < 1.0)
            ends = np.concatenate([[0.0], x[keep], [1.0]])
            vals = np.concatenate([self.iterate([0.0], k + 1), v[keep], self.iterate([1.0], k + 1)])
            yield k + 1, ends, vals

    def lap_partition(self, n, guard=LAP_GUARD):
        """Endpoints of the laps of f^n and the values of f^n there."""
        if n < 1:
            raise ValueError("n must be >= 1")
        for _, ends, vals in self.iter_lap_partitions(n, guard):
            pass
        return ends, vals

    def lap_count(self, n, guard=LAP_GUARD):
        return len(self.lap_partition(n, guard)[0]) - 1

    def laps(self, n, guard=LAP_GUARD):
        """Maximal intervals of monotonicity of f^n, in order, tiling [0, 1]."""
        ends, _ = self.lap_partition(n, guard)
        return [IntervalQ(a, b) for a, b in zip(ends[:-1], ends[1:])]


def identity_like_map():
    """x -> x as a piecewise-affine object; used only as a negative control.

    It bypasses the multimodality check, so it is not a MultimodalMap.
    """
    return _IdentityControl()


class _IdentityControl:
    family = "identity"
    turning_points = ()
    critical_points = ()

    def eval(self, x):
        return float(x)

    def evaluate(self, x):
        return np.asarray(x, dtype=float).copy()

    def image_interval(self, J):
        return IntervalQ(J.lo, J.hi)

    def image_intervals(self, lo, hi):
        return np.asarray(lo, dtype=float).copy(), np.asarray(hi, dtype=float).copy()
