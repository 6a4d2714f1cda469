"""Pull-backs, chains and criticality; semi-hyperbolicity, shrinking and nice sets.

A pull-back of J by f^n is a connected component of f^{-n}(J).  Components
are computed level by level: each component at level k is split over the
laps of f, inverted branch by branch, and pieces meeting at a turning point
whose value lies in the component are merged.

Chains toward a ball around f^m(x) are built by the kernels in
:mod:`intervalqs.kernels`, which also run the semi-hyperbolicity scan.
"""
from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from . import kernels
from .errors import BoundaryTieError, DomainError, GuardExceeded, NotDiffeomorphicError
from .maps import IntervalQ

COMPONENT_GUARD = 10**6
TIE_NUDGE = 1e-6
TIE_RETRIES = 3


@dataclass(frozen=True)
class Chain:
    """Intervals G_0, ..., G_s with G_i a component of f^{-1}(G_{i+1})."""

    intervals: tuple
    criticality: int

    def __len__(self):
        return len(self.intervals)


@dataclass(frozen=True)
class CriticalityRecord:
    x: float
    m: int
    r: float
    count: int
    flagged_indices: tuple = ()
    chain: Chain | None = field(default=None, compare=False, repr=False)


@dataclass(frozen=True)
class NiceCandidate:
    """One open interval per critical point, optionally with outer intervals."""

    components: tuple
    outer: tuple | None = None

    def __post_init__(self):
        comps = sorted(self.components, key=lambda J: J.lo)
        for a, b in zip(comps[:-1], comps[1:]):
            if b.lo < a.hi:
                raise DomainError("nice-set components overlap")
        object.__setattr__(self, "components", tuple(comps))
        if self.outer is not None:
            outer = tuple(sorted(self.outer, key=lambda J: J.lo))
            if len(outer) != len(comps):
                raise DomainError("need one outer interval per component")
            object.__setattr__(self, "outer", outer)

    def validate(self, fmap):
        """Raise unless each component holds exactly one critical point."""
        crit = [cp.location for cp in fmap.critical_points]
        for J in self.components:
            inside = [c for c in crit if J.lo < c < J.hi]
            if len(inside) != 1:
                raise DomainError(f"{J} contains {len(inside)} critical points, expected 1")
        return self

    def contains(self, x):
        x = np.asarray(x, dtype=float)
        out = np.zeros(x.shape, dtype=bool)
        for J in self.components:
            out |= (x > J.lo) & (x < J.hi)
        return out


# components -----------------------------------------------------------------
def _crit_array(fmap, which="all"):
    if which == "turning":
        return np.asarray(fmap.turning_points, dtype=float)
    if which == "all":
        return np.asarray([cp.location for cp in fmap.critical_points], dtype=float)
    raise ValueError("criticality set must be 'turning' or 'all'")


def pull_once(fmap, lo, hi, guard=COMPONENT_GUARD):
    """Components of f^{-1} of each interval (lo[i], hi[i]).

    Returns ``(lo, hi, parent)`` sorted by parent then position; ``parent[k]``
    indexes the interval whose preimage contains component k.  Endpoint
    openness is ignored (the pieces are the closures, merged at shared
    endpoints), which is all that length and measure computations need.
    """
    lo = np.asarray(lo, dtype=float)
    hi = np.asarray(hi, dtype=float)
    parents = np.arange(len(lo))
    ends, vals = fmap.lap_ends, fmap.lap_values
    a_parts, b_parts, p_parts = [], [], []
    for k in range(len(ends) - 1):
        va, vb = vals[k], vals[k + 1]
        vmin, vmax = min(va, vb), max(va, vb)
        mask = (lo < vmax) & (hi > vmin)
        if not np.any(mask):
            continue
        jl, jh, par = lo[mask], hi[mask], parents[mask]
        a_in = (jl <= va) & (va <= jh)
        b_in = (jl <= vb) & (vb <= jh)
        ta = np.where(va <= jl, jl, jh)
        tb = np.where(vb <= jl, jl, jh)
        xa = np.where(a_in, ends[k], fmap.inverse_branch(k, np.where(a_in, va, ta)))
        xb = np.where(b_in, ends[k + 1], fmap.inverse_branch(k, np.where(b_in, vb, tb)))
        keep = xb > xa
        a_parts.append(xa[keep])
        b_parts.append(xb[keep])
        p_parts.append(par[keep])
    if not a_parts:
        return np.empty(0), np.empty(0), np.empty(0, dtype=int)
    xa = np.concatenate(a_parts)
    xb = np.concatenate(b_parts)
    par = np.concatenate(p_parts)
    order = np.lexsort((xa, par))
    xa, xb, par = xa[order], xb[order], par[order]
    start = np.ones(len(xa), dtype=bool)
    start[1:] = (par[1:] != par[:-1]) | (xa[1:] != xb[:-1])
    idx = np.flatnonzero(start)
    out_lo = xa[idx]
    out_hi = np.maximum.reduceat(xb, idx)
    if len(idx) > guard:
        raise GuardExceeded(f"{len(idx)} pull-back components exceed guard {guard}")
    return out_lo, out_hi, par[idx]


def _hits(crit, lo, hi):
    if len(crit) == 0:
        return np.zeros(len(lo), dtype=bool)
    return np.searchsorted(crit, hi, side="left") > np.searchsorted(crit, lo, side="right")


def pullback_levels(fmap, J, n, guard=COMPONENT_GUARD, criticality_set="all"):
    """Yield ``(k, lo, hi, D)`` for k = 0 .. n.

    ``D[i]`` counts the intervals of the chain from component i up to J
    (J itself excluded) that contain a critical point.
    """
    crit = _crit_array(fmap, criticality_set)
    lo, hi = np.array([J.lo]), np.array([J.hi])
    D = np.zeros(1, dtype=int)
    yield 0, lo, hi, D
    for k in range(1, n + 1):
        lo, hi, par = pull_once(fmap, lo, hi, guard)
        D = D[par] + _hits(crit, lo, hi)
        yield k, lo, hi, D


def pullback_components(fmap, J, n, guard=COMPONENT_GUARD):
    """All connected components of f^{-n}(J), in increasing order."""
    if n < 1:
        raise ValueError("n must be >= 1")
    if J.is_empty:
        return []
    for _, lo, hi, _ in pullback_levels(fmap, J, n, guard):
        pass
    order = np.argsort(lo)
    return [IntervalQ(float(a), float(b)) for a, b in zip(lo[order], hi[order])]


# chains and criticality -----------------------------------------------------
def chain_to(fmap, J, m, x):
    """Chain W_0, ..., W_m with W_m = J and W_j the pull-back containing f^j(x).

    ``J`` is an IntervalQ containing f^m(x), normally B_I(f^m(x), r); a bare
    number is read as the radius r.  Raises :class:`BoundaryTieError` when an
    orbit point is not strictly inside its component.
    """
    o = kernels.orbit(fmap, x, m)
    if not isinstance(J, IntervalQ):
        J = IntervalQ.ball(o[m], float(J))
    lefts, rights, tie = kernels.chain(fmap, o, m, J.lo, J.hi)
    if tie >= 0:
        raise BoundaryTieError(tie)
    crit = _crit_array(fmap, "all")
    ivs = tuple(IntervalQ(a, b) for a, b in zip(lefts, rights))
    count = int(sum(bool(_hits(crit, [W.lo], [W.hi])[0]) for W in ivs[:-1]))
    return Chain(ivs, count)


def criticality(fmap, x, m, r, criticality_set="turning", nudge=True):
    """Criticality of f^m at x with respect to r, with its flagged indices.

    On a boundary tie the radius is enlarged by one part in 10**6 (up to a
    few times) when ``nudge`` is set; the record carries the radius used.
    """
    if m == 0:
        return CriticalityRecord(float(x), 0, float(r), 0, ())
    crit = _crit_array(fmap, criticality_set)
    rr = float(r)
    for attempt in range(TIE_RETRIES + 1):
        try:
            ch = chain_to(fmap, rr, m, x)
            break
        except BoundaryTieError:
            if not nudge or attempt == TIE_RETRIES:
                raise
            rr *= 1.0 + TIE_NUDGE
    flagged = tuple(j for j, W in enumerate(ch.intervals[:-1]) if _hits(crit, [W.lo], [W.hi])[0])
    return CriticalityRecord(float(x), int(m), rr, len(flagged), flagged, ch)


@dataclass
class ScanResult:
    """Output of :func:`semi_hyperbolicity_scan`.

    ``raw[n]`` is the max criticality over the grid at depth n and ``curve``
    its running maximum.  ``unresolved[n]`` counts grid points whose chain
    could not be resolved (boundary tie surviving the radius nudges, or
    components below double precision).  Depths past ``effective_n_max``
    have too many unresolved points and are excluded from the verdict.
    """

    r: float
    n_max: int
    grid_size: int
    criticality_set: str
    raw: np.ndarray
    curve: np.ndarray
    unresolved: np.ndarray
    effective_n_max: int
    D: int
    plateau: bool
    window: int
    D_max: int
    argmax_x: float
    backend: str = kernels.BACKEND

    @property
    def semi_hyperbolic(self):
        return bool(self.plateau and self.D <= self.D_max)

    def rows(self):
        for n in range(1, self.n_max + 1):
            yield n, int(self.raw[n]), int(self.curve[n]), int(self.unresolved[n]), n <= self.effective_n_max


def scan_grid(fmap, grid_size):
    return np.unique(np.concatenate([np.linspace(0.0, 1.0, grid_size + 1), fmap.turning_points]))


def semi_hyperbolicity_scan(fmap, r=0.01, n_max=20, grid_size=2**10, criticality_set="turning",
                            window=5, D_max=4, unresolved_fraction=0.01, backend=None):
    """Max criticality over a grid for depths 1..n_max.

    The grid is ``grid_size + 1`` uniform points plus the turning points.
    Verdict: the running-max curve shows zero growth over the last ``window``
    resolved depths and its plateau D is at most ``D_max``.
    """
    xs = scan_grid(fmap, grid_size)
    crit = _crit_array(fmap, criticality_set)
    counts, ties = kernels.criticality_table(fmap, xs, n_max, r, crit, backend=backend)
    rr = r
    for _ in range(TIE_RETRIES):
        rows = np.flatnonzero(ties.any(axis=1))
        if len(rows) == 0:
            break
        rr *= 1.0 + TIE_NUDGE
        c2, t2 = kernels.criticality_table(fmap, xs[rows], n_max, rr, crit, backend=backend)
        fix = ties[rows] & ~t2
        sub_c, sub_t = counts[rows], ties[rows]
        sub_c[fix] = c2[fix]
        sub_t[fix] = False
        counts[rows], ties[rows] = sub_c, sub_t
    resolved_counts = np.where(ties, 0, counts)
    raw = resolved_counts.max(axis=0)
    unresolved = ties.sum(axis=0)
    bad = np.flatnonzero(unresolved > unresolved_fraction * len(xs))
    eff = int(bad[0] - 1) if len(bad) else n_max
    eff = max(eff, 0)
    curve = np.maximum.accumulate(raw)
    D = int(curve[eff])
    lo = max(eff - window, 0)
    plateau = eff >= window and bool(curve[eff] == curve[lo])
    last = resolved_counts[:, eff] if eff > 0 else resolved_counts[:, 0]
    return ScanResult(float(r), int(n_max), int(grid_size), criticality_set, raw, curve, unresolved, eff, D,
                      plateau, int(window), int(D_max), float(xs[int(np.argmax(last))]),
                      backend or kernels.BACKEND)


# shrinking of components ----------------------------------------------------
def dyadic_intervals(delta):
    k = int(round(1.0 / delta))
    edges = np.linspace(0.0, 1.0, k + 1)
    return [IntervalQ(a, b) for a, b in zip(edges[:-1], edges[1:])]


def max_component_lengths(fmap, delta, n_max, guard=COMPONENT_GUARD):
    """L[n] = max length of a component of f^{-n}(U) over dyadic U of length delta."""
    L = np.zeros(n_max + 1)
    for U in dyadic_intervals(delta):
        for k, lo, hi, _ in pullback_levels(fmap, U, n_max, guard):
            if len(lo):
                L[k] = max(L[k], float(np.max(hi - lo)))
    return L


def esc_rate(fmap, delta=2.0**-6, n_max=14, guard=COMPONENT_GUARD):
    """Exponential shrinking rate of pull-back components.

    With L_n the longest component of any n-fold pull-back of a dyadic test
    interval of length ``delta`` and n0 = n_max // 2, returns
    ``min over n0 < n <= n_max of (L_{n0} / L_n) ** (1 / (n - n0))``,
    the worst per-step contraction over the second half of the budget.
    """
    if n_max < 2:
        raise ValueError("n_max must be >= 2")
    L = max_component_lengths(fmap, delta, n_max, guard)
    n0 = n_max // 2
    n = np.arange(n0 + 1, n_max + 1)
    rates = (L[n0] / L[n]) ** (1.0 / (n - n0))
    return float(np.min(rates))


def pullback_stability(fmap, kappa, deltas=None, n_max=12, guard=COMPONENT_GUARD):
    """Largest scanned delta whose pull-backs (n <= n_max) all stay shorter than kappa.

    Returns None when no scanned delta qualifies.
    """
    if deltas is None:
        deltas = [2.0**-k for k in range(2, 11)]
    for delta in sorted(deltas, reverse=True):
        if np.max(max_component_lengths(fmap, delta, n_max, guard)) < kappa:
            return float(delta)
    return None


# distortion -----------------------------------------------------------------
def distortion(fmap, T, s, samples=200):
    """max |Df^s(x)| / |Df^s(y)| over ``samples`` points of T.

    Raises :class:`NotDiffeomorphicError` if a lap end of f^s lies strictly
    inside T or Df^s vanishes on T.
    """
    ends, _ = fmap.lap_partition(s)
    inner = ends[(ends > T.lo) & (ends < T.hi)]
    if len(inner):
        raise NotDiffeomorphicError(f"f^{s} turns at {inner[0]!r} inside {T}")
    x = np.linspace(T.lo, T.hi, samples)
    d = fmap.deriv_iterate(x, s)
    if np.min(d) <= 0:
        raise NotDiffeomorphicError(f"Df^{s} vanishes on {T}")
    return float(np.max(d) / np.min(d))


# nice sets ------------------------------------------------------------------
def verify_nice_set(fmap, V, n_max=50):
    """(True, None) if no boundary orbit re-enters V within n_max steps.

    Otherwise (False, (point, n)) for the first boundary point in order whose
    n-th image lands in V.
    """
    for J in V.components:
        for p in (J.lo, J.hi):
            x = p
            for n in range(1, n_max + 1):
                x = fmap.eval(x)
                if V.contains(x):
                    return False, (p, n)
    return True, None


def nice_couple_modulus(V_hat, V):
    """min over components of the smaller gap of V_hat^c minus V^c, over |V^c|."""
    outer = V_hat.components if isinstance(V_hat, NiceCandidate) else tuple(V_hat)
    inner = V.components if isinstance(V, NiceCandidate) else tuple(V)
    if len(outer) != len(inner):
        raise DomainError("nice couple needs matching components")
    best = np.inf
    for O, J in zip(sorted(outer, key=lambda I: I.lo), sorted(inner, key=lambda I: I.lo)):
        if not (O.lo <= J.lo and J.hi <= O.hi):
            raise DomainError(f"{J} is not contained in {O}")
        best = min(best, min(J.lo - O.lo, O.hi - J.hi) / J.length)
    return float(best)


def closest_return(fmap, c, n_max):
    """(min over 1 <= n <= n_max of |f^n(c) - c|, argmin n)."""
    x, best, arg = c, np.inf, 0
    for n in range(1, n_max + 1):
        x = fmap.eval(x)
        g = abs(x - c)
        if g < best:
            best, arg = g, n
    return best, arg


def _nice_sets(fmap, n_max, shrink, tries):
    """Successive passing candidates as all half-widths shrink together."""
    crit = [cp.location for cp in fmap.critical_points]
    widths = []
    for i, c in enumerate(crit):
        gap, _ = closest_return(fmap, c, n_max)
        room = [c, 1.0 - c]
        if i:
            room.append(0.5 * (c - crit[i - 1]))
        if i + 1 < len(crit):
            room.append(0.5 * (crit[i + 1] - c))
        widths.append(min(0.5 * gap, 0.999 * min(room)))
    for _ in range(tries):
        V = NiceCandidate(tuple(IntervalQ(c - e, c + e) for c, e in zip(crit, widths)))
        if verify_nice_set(fmap, V, n_max)[0]:
            yield V
        widths = [e * shrink for e in widths]


def find_nice_set(fmap, n_max=50, shrink=0.9, tries=200):
    """Symmetric intervals around the critical points, seeded by closest returns.

    Each half-width starts at half the critical point's closest-return gap
    (capped so components stay disjoint inside I) and all of them shrink
    together until :func:`verify_nice_set` passes.  Returns None on failure.
    """
    return next(_nice_sets(fmap, n_max, shrink, tries), None)


def _avoids(fmap, V, outer, n_max):
    for J in V.components:
        for p in (J.lo, J.hi):
            x = p
            for _ in range(n_max):
                x = fmap.eval(x)
                if outer.contains(x):
                    return False
    return True


def find_nice_couple(fmap, n_max=50, taus=(1.0, 0.5, 0.25, 0.1, 0.05), shrink=0.9, tries=200):
    """A nice couple (V_hat, V), or None.

    V runs through the nice sets of :func:`find_nice_set`'s shrinking
    sequence; V_hat enlarges each component by tau times its length on both
    sides (largest tau first) and must itself be nice, with the boundary
    orbits of V avoiding V_hat.
    """
    for V in _nice_sets(fmap, n_max, shrink, tries):
        for tau in taus:
            try:
                outer = NiceCandidate(tuple(
                    IntervalQ(max(J.lo - tau * J.length, 0.0), min(J.hi + tau * J.length, 1.0))
                    for J in V.components)).validate(fmap)
            except DomainError:
                continue
            if verify_nice_set(fmap, outer, n_max)[0] and _avoids(fmap, V, outer, n_max):
                return NiceCandidate(V.components, outer.components)
    return None
