"""Entropy, exactness and periodic orbits.

Topological entropy is the growth rate of the lap number of f^n.  Periodic
points of period n are found by bisection on f^n(x) - x wherever it
changes sign, scanning the lap ends of f^n plus interior samples.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import GuardExceeded, ScreenFailure
from .maps import LAP_GUARD, IntervalQ

ENDPOINT_TOL = 1e-9
PERIODIC_TOL = 1e-9
SAMPLE_BUDGET = 2**16


@dataclass(frozen=True)
class EntropyEstimate:
    h_top: float
    s: float
    n_used: int
    residual: float
    lap_counts: tuple = ()


def lap_counts(fmap, n_max, guard=LAP_GUARD, cap=False):
    """[lap(f^1), ..., lap(f^n_max)].

    With ``cap`` the list stops at the last depth within ``guard`` instead of
    raising :class:`GuardExceeded`.
    """
    out = []
    try:
        for _, ends, _ in fmap.iter_lap_partitions(n_max, guard):
            out.append(len(ends) - 1)
    except GuardExceeded:
        if not cap:
            raise
    return out


def topological_entropy(fmap, n_max=16, guard=LAP_GUARD, cap=False):
    """Least-squares growth rate of log lap(f^n) over n in [n_max/2, n_max].

    With ``cap`` a lap explosion lowers n_max to the deepest depth within
    ``guard`` (at least 4) instead of raising.
    """
    if n_max < 4:
        raise ValueError("n_max must be >= 4")
    counts = np.array(lap_counts(fmap, n_max, guard, cap), dtype=float)
    n_max = len(counts)
    if n_max < 4:
        raise GuardExceeded(f"lap guard {guard} reached before depth 4")
    n = np.arange(1, n_max + 1)
    sel = n >= (n_max + 1) // 2
    x, y = n[sel], np.log(counts[sel])
    slope, icpt = np.polyfit(x, y, 1)
    resid = float(np.max(np.abs(y - (slope * x + icpt))))
    h = max(float(slope), 0.0)
    return EntropyEstimate(h, float(np.exp(h)), int(sel.sum()), resid, tuple(int(c) for c in counts))


@dataclass(frozen=True)
class ExactnessResult:
    """Resolution-bounded exactness certificate.

    ``exact`` says every dyadic interval of length 2^-depth covered [0, 1]
    within ``n_max`` steps; ``max_steps`` is the slowest one.  Otherwise
    ``witness`` is the first interval that did not.  This is evidence at a
    finite resolution, not a proof.
    """

    exact: bool
    witness: IntervalQ | None
    max_steps: int
    depth: int
    n_max: int

    def __bool__(self):
        return self.exact


def is_topologically_exact(fmap, depth=10, n_max=50, tol=ENDPOINT_TOL):
    if depth > 20:
        raise ValueError("depth must be <= 20")
    edges = np.linspace(0.0, 1.0, 2**depth + 1)
    lo, hi = edges[:-1].copy(), edges[1:].copy()
    steps = np.full(len(lo), -1)
    active = np.arange(len(lo))
    for n in range(1, n_max + 1):
        lo_a, hi_a = fmap.image_intervals(lo[active], hi[active])
        lo[active], hi[active] = lo_a, hi_a
        done = (lo_a <= tol) & (hi_a >= 1.0 - tol)
        steps[active[done]] = n
        active = active[~done]
        if len(active) == 0:
            break
    if len(active):
        i = int(active[0])
        return ExactnessResult(False, IntervalQ(float(edges[i]), float(edges[i + 1])), -1, depth, n_max)
    return ExactnessResult(True, None, int(steps.max()), depth, n_max)


@dataclass(frozen=True)
class PeriodicOrbit:
    period: int
    points: tuple
    multiplier: float
    residual: float = 0.0

    @property
    def repelling(self):
        return self.multiplier > 1.0


def _fixed_points_of_iterate(fmap, n, guard, samples=SAMPLE_BUDGET):
    """Roots of f^n(x) = x.

    A lap of f^n can hold two fixed points (a pair just born in a
    saddle-node), so each lap is also sampled at interior points, within a
    total budget, and every sign change is bisected.
    """
    ends, vals = fmap.lap_partition(n, guard)
    per_lap = max(samples // (len(ends) - 1), 1)
    if per_lap > 1:
        t = np.arange(1, per_lap) / per_lap
        inner = (ends[:-1, None] + t[None, :] * np.diff(ends)[:, None]).ravel()
        ends = np.unique(np.concatenate([ends, inner]))
        vals = fmap.iterate(ends, n)
    g = vals - ends
    roots = list(ends[g == 0.0])
    lo, hi = ends[:-1], ends[1:]
    glo, ghi = g[:-1], g[1:]
    change = glo * ghi < 0
    lo, hi, glo = lo[change].copy(), hi[change].copy(), glo[change]
    for _ in range(80):
        mid = 0.5 * (lo + hi)
        gm = fmap.iterate(mid, n) - mid
        same = np.sign(gm) == np.sign(glo)
        lo = np.where(same, mid, lo)
        hi = np.where(same, hi, mid)
    roots.extend((0.5 * (lo + hi)).tolist())
    roots = np.unique(np.asarray(roots, dtype=float))
    if len(roots) > 1:
        keep = np.concatenate([[True], np.diff(roots) > PERIODIC_TOL])
        roots = roots[keep]
    return roots


def periodic_points(fmap, n, guard=LAP_GUARD):
    """Orbits of exact period n, each listed from its smallest point."""
    if n < 1 or n > 20:
        raise ValueError("period must lie in 1..20")
    roots = _fixed_points_of_iterate(fmap, n, guard)
    for d in range(1, n):
        if n % d == 0 and len(roots):
            roots = roots[np.abs(fmap.iterate(roots, d) - roots) > PERIODIC_TOL]
    orbits = []
    used = np.zeros(len(roots), dtype=bool)
    for i in range(len(roots)):
        if used[i]:
            continue
        orb = [float(roots[i])]
        for _ in range(n - 1):
            orb.append(fmap.eval(orb[-1]))
        for p in orb:
            used |= np.abs(roots - p) <= 1e-7
        pts = np.asarray(orb)
        mults = fmap.deriv_iterate(pts, n)
        resid = float(np.max(np.abs(fmap.iterate(pts, n) - pts)))
        start = int(np.argmin(pts))
        orbits.append(PeriodicOrbit(n, tuple(orb[start:] + orb[:start]), float(mults[start]), resid))
    return orbits


def uniform_hyperbolicity_lower(fmap, p_max=8, guard=LAP_GUARD):
    """min over orbits of period n <= p_max of multiplier^(1/n)."""
    if p_max > 14:
        raise ValueError("p_max must be <= 14")
    best = np.inf
    for n in range(1, p_max + 1):
        for orb in periodic_points(fmap, n, guard):
            best = min(best, orb.multiplier ** (1.0 / n))
    return float(best)


def repelling_screen(fmap, p_max=8, guard=LAP_GUARD):
    """Raise ScreenFailure on the first non-repelling orbit of period <= p_max.

    Returns the number of orbits checked.
    """
    count = 0
    for n in range(1, p_max + 1):
        for orb in periodic_points(fmap, n, guard):
            count += 1
            if not orb.repelling:
                raise ScreenFailure(
                    f"non-repelling period-{n} orbit at {orb.points[0]!r} (multiplier {orb.multiplier:.6g})")
    return count
