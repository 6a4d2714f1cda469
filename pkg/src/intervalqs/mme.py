"""The maximal entropy measure and doubling diagnostics.

The constant-Jacobian measure is the fixed point of the dual transfer
operator ``nu -> sum over laps L of nu(f(. & L))``.  Starting from Lebesgue,
the n-th iterate has a closed form on the laps of f^n::

    nu_n([0, x]) = (sum_{laps left of x} |f^n(L)| + |f^n(x) - f^n(t_k)|) / Var(f^n)

so each power-iteration step is evaluated exactly, without a grid.  The
ratio Var(f^n) / Var(f^{n-1}) converges to the eigenvalue s = exp(h_top).

For maps whose laps are not all full, that conformal measure is not
invariant.  The invariant maximal entropy measure is its push-forward limit
``mu(A) = lim nu(f^{-n} A)``; on each lap of f^n the Jacobian of nu is s^n,
so ``nu(f^{-n}[0, y]) = s^{-n} sum_L nu(f^n(L) & [0, y])``.
"""
from __future__ import annotations

import csv
import io
import json
from dataclasses import dataclass, field

import numpy as np

from .errors import ConvergenceError, GuardExceeded

DEFAULT_GRID = 2**12
DEFAULT_TOL = 1e-6
DEFAULT_ITER_MAX = 200
DEFAULT_LAP_BUDGET = 2**22


class _CdfMixin:
    """Interval masses from a cumulative distribution ``cdf``."""

    def mass(self, a, b):
        a = np.clip(np.asarray(a, dtype=float), 0.0, 1.0)
        b = np.clip(np.asarray(b, dtype=float), 0.0, 1.0)
        return np.maximum(self.cdf(b) - self.cdf(a), 0.0)

    def ball(self, x, r):
        """mu(B_I(x, r))."""
        x = np.asarray(x, dtype=float)
        return self.mass(x - r, x + r)


@dataclass(frozen=True)
class GridMeasure(_CdfMixin):
    """Non-atomic probability measure on [0, 1] stored as a cdf on a partition.

    Masses inside a cell are interpolated linearly, unless the measure came
    with an ``exact`` cdf evaluator (as :func:`compute_mme` outputs do), in
    which case the table is used for export and checks and queries go to the
    evaluator.  :meth:`tabulated` drops the evaluator.
    """

    partition: np.ndarray
    cdf_values: np.ndarray
    meta: dict = field(default_factory=dict, compare=False)
    exact: object = field(default=None, compare=False, repr=False)

    def __post_init__(self):
        p = np.asarray(self.partition, dtype=float)
        c = np.asarray(self.cdf_values, dtype=float)
        if p.ndim != 1 or p.shape != c.shape or len(p) < 2:
            raise ValueError("partition and cdf must be 1-d arrays of equal length >= 2")
        if p[0] != 0.0 or p[-1] != 1.0 or np.any(np.diff(p) <= 0):
            raise ValueError("partition must increase strictly from 0 to 1")
        if np.any(np.diff(c) < 0):
            raise ValueError("cdf must be non-decreasing")
        if abs(c[0]) > 1e-12 or abs(c[-1] - 1.0) > 1e-12:
            raise ValueError("cdf must run from 0 to 1")
        c = c.copy()
        c[0], c[-1] = 0.0, 1.0
        object.__setattr__(self, "partition", p)
        object.__setattr__(self, "cdf_values", c)

    @classmethod
    def lebesgue(cls, n=DEFAULT_GRID):
        x = np.linspace(0.0, 1.0, n + 1)
        return cls(x, x.copy())

    @classmethod
    def from_cdf(cls, func, partition):
        p = np.asarray(partition, dtype=float)
        return cls(p, func(p))

    @property
    def n_cells(self):
        return len(self.partition) - 1

    def cdf(self, x):
        if self.exact is not None:
            return self.exact(x)
        return np.interp(x, self.partition, self.cdf_values)

    def tabulated(self):
        """The same table with linear interpolation only."""
        return GridMeasure(self.partition, self.cdf_values, dict(self.meta))

    def inverse_cdf(self, y, steps=60):
        """Generalised inverse: binary search for the table cell, then linear
        interpolation, or bisection inside the cell when ``exact`` is set."""
        c = self.cdf_values
        keep = np.concatenate([[True], np.diff(c) > 0])
        if self.exact is None:
            return np.interp(y, c[keep], self.partition[keep])
        y = np.asarray(y, dtype=float)
        k = np.clip(np.searchsorted(c, y, side="left") - 1, 0, self.n_cells - 1)
        lo, hi = self.partition[k].copy(), self.partition[k + 1].copy()
        for _ in range(steps):
            mid = 0.5 * (lo + hi)
            below = self.exact(mid) < y
            lo = np.where(below, mid, lo)
            hi = np.where(below, hi, mid)
        return 0.5 * (lo + hi)

    def cell_masses(self):
        return np.diff(self.cdf_values)

    def invariant_violations(self, atom_factor=10.0):
        """GridMeasure invariants that fail, as a list of messages."""
        out = []
        m = self.cell_masses()
        if np.any(m < 0):
            out.append("cdf decreases")
        if np.any(m <= 0):
            out.append(f"{int(np.sum(m <= 0))} cells carry no mass (support is not all of I)")
        if m.max() > atom_factor / self.n_cells:
            out.append(f"largest cell mass {m.max():.3e} exceeds {atom_factor}/N (atom-like)")
        return out

    def to_csv(self):
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(["x", "cdf"])
        for x, c in zip(self.partition, self.cdf_values):
            w.writerow([f17(x), f17(c)])
        return buf.getvalue()


class ConformalMeasure(_CdfMixin):
    """Exact evaluator of a dual power iterate.

    With ``parent`` None this is ``L*^n Leb`` normalised, where n = ``depth``;
    otherwise it is ``L*^n parent`` normalised, which reuses the same lap
    partition of f^n to advance n further steps.
    """

    def __init__(self, fmap, depth, ends, values, parent=None):
        self.fmap = fmap
        self.depth = depth
        self.ends = ends
        self.values = values
        self.parent = parent
        self.level = 1 if parent is None else parent.level + 1
        uniq, inv = np.unique(values, return_inverse=True)
        g = self._base(uniq)[inv]
        self._gv = g
        weights = np.abs(np.diff(g))
        self.prefix = np.concatenate([[0.0], np.cumsum(weights)])
        self.total = float(self.prefix[-1])
        if self.total <= 0:
            raise ValueError("degenerate lap weights")
        self.s_hat = self.total ** (1.0 / depth)

    @property
    def steps(self):
        """Number of single dual-operator applications behind this iterate."""
        return self.depth * self.level

    @property
    def n_laps(self):
        return len(self.ends) - 1

    def _base(self, y):
        if self.parent is None:
            return np.clip(np.asarray(y, dtype=float), 0.0, 1.0)
        return self.parent.cdf(y)

    def _lap(self, x):
        return np.clip(np.searchsorted(self.ends, x, side="right") - 1, 0, self.n_laps - 1)

    def cdf(self, x):
        x = np.clip(np.asarray(x, dtype=float), 0.0, 1.0)
        k = self._lap(x)
        fx = self.fmap.iterate(x, self.depth)
        part = np.minimum(np.abs(self._base(fx) - self._gv[k]), self.prefix[k + 1] - self.prefix[k])
        return np.clip((self.prefix[k] + part) / self.total, 0.0, 1.0)

    def inverse_cdf(self, y, steps=64):
        """Bisection inside the lap that carries the requested mass."""
        y = np.clip(np.asarray(y, dtype=float), 0.0, 1.0)
        target = y * self.total
        k = np.clip(np.searchsorted(self.prefix, target, side="right") - 1, 0, self.n_laps - 1)
        lo, hi = self.ends[k].copy(), self.ends[k + 1].copy()
        for _ in range(steps):
            mid = 0.5 * (lo + hi)
            below = self.cdf(mid) < y
            lo = np.where(below, mid, lo)
            hi = np.where(below, hi, mid)
        return 0.5 * (lo + hi)

    def to_grid(self, n=DEFAULT_GRID, exact=True):
        return GridMeasure(*_adaptive_table(self, n), meta={"kind": "conformal", "steps": self.steps},
                           exact=self.cdf if exact else None)


class InvariantMeasure(_CdfMixin):
    """Push-forward limit nu(f^{-n} .) of the conformal measure.

    ``ends, values`` give the lap partition of f^n used; by default the
    conformal measure's own block partition.
    """

    def __init__(self, conformal, ends=None, values=None):
        self.conformal = conformal
        ends = conformal.ends if ends is None else ends
        values = conformal.values if values is None else values
        lo = np.minimum(values[:-1], values[1:])
        hi = np.maximum(values[:-1], values[1:])
        pairs, counts = np.unique(np.stack([lo, hi], axis=1), axis=0, return_counts=True)
        self.lo, self.hi, self.counts = pairs[:, 0], pairs[:, 1], counts.astype(float)
        self._glo = conformal.cdf(self.lo)
        self._ghi = conformal.cdf(self.hi)
        self.total = float(np.sum(self.counts * (self._ghi - self._glo)))

    @property
    def is_conformal(self):
        """True when every lap of f^n is full, so the two measures coincide."""
        return len(self.lo) == 1 and self.lo[0] == 0.0 and self.hi[0] == 1.0

    def cdf(self, y):
        y = np.clip(np.asarray(y, dtype=float), 0.0, 1.0)
        if self.is_conformal:
            return self.conformal.cdf(y)
        gy = self.conformal.cdf(y)
        acc = np.zeros_like(gy)
        for lo, hi, glo, ghi, c in zip(self.lo, self.hi, self._glo, self._ghi, self.counts):
            acc += c * (np.where(y < hi, gy, ghi) - np.where(y < lo, gy, glo))
        return np.clip(acc / self.total, 0.0, 1.0)

    def inverse_cdf(self, y, steps=64):
        y = np.asarray(y, dtype=float)
        lo, hi = np.zeros_like(y), np.ones_like(y)
        for _ in range(steps):
            mid = 0.5 * (lo + hi)
            below = self.cdf(mid) < y
            lo = np.where(below, mid, lo)
            hi = np.where(below, hi, mid)
        return 0.5 * (lo + hi)

    def to_grid(self, n=DEFAULT_GRID, exact=True):
        return GridMeasure(*_adaptive_table(self, n), meta={"kind": "invariant", "steps": self.conformal.steps},
                           exact=self.cdf if exact else None)


def _adaptive_table(measure, n):
    """Partition mixing n/2 uniform cells with n/2 equal-mass quantile cells.

    Every cell then has length <= 2/n and mass <= 2/n, which keeps linear
    interpolation honest near the square-root cusps at postcritical points.
    Quantile points whose cdf value repeats a neighbour's (forward iteration
    cannot resolve x within about 1e-8 of a critical point) are dropped.
    """
    half = max(n // 2, 1)
    uniform = np.linspace(0.0, 1.0, half + 1)
    quant = measure.inverse_cdf(np.linspace(0.0, 1.0, half + 1)[1:-1])
    p = np.concatenate([uniform, quant])
    is_q = np.concatenate([np.zeros(len(uniform), bool), np.ones(len(quant), bool)])
    order = np.argsort(p, kind="stable")
    p, is_q = p[order], is_q[order]
    keep = np.ones(len(p), dtype=bool)
    keep[1:] = np.diff(p) > 0
    p, is_q = p[keep], is_q[keep]
    c = measure.cdf(p)
    c[0], c[-1] = 0.0, 1.0
    c = np.maximum.accumulate(c)
    flat_left = np.concatenate([[False], np.diff(c) <= 0])
    flat_right = np.concatenate([np.diff(c) <= 0, [False]])
    keep = ~(is_q & (flat_left | flat_right))
    return p[keep], c[keep]


@dataclass
class MMEResult:
    """Output of :func:`conformal_measure`: the evaluator plus run diagnostics."""

    measure: ConformalMeasure
    s_hat: float
    iterations: int
    residual: float
    converged: bool
    history: list = field(default_factory=list)


def _block_partition(fmap, iter_max, lap_budget, block_laps):
    """Lap partition of f^n for the smallest n with at least ``block_laps`` laps."""
    ends = vals = None
    n = 0
    try:
        for n, ends, vals in fmap.iter_lap_partitions(iter_max, guard=lap_budget):
            if len(ends) - 1 >= block_laps:
                break
    except GuardExceeded:
        pass
    return n, ends, vals


def conformal_measure(fmap, tol=DEFAULT_TOL, iter_max=DEFAULT_ITER_MAX, lap_budget=DEFAULT_LAP_BUDGET,
                      probe=2**12, block_laps=2**17, strict=True):
    """Power iteration of the dual zero-potential transfer operator from Lebesgue.

    The iteration advances in blocks of n steps, n being the first depth
    whose lap partition has ``block_laps`` laps.  It stops when successive
    cdfs differ by at most ``tol`` in sup norm on a probe grid.  Raises
    :class:`ConvergenceError` (carrying the partial result) if ``iter_max``
    single steps pass first and ``strict`` is set.
    """
    n, ends, vals = _block_partition(fmap, iter_max, lap_budget, block_laps)
    xs = np.linspace(0.0, 1.0, probe + 1)
    prev_cdf = xs.copy()
    history = []
    meas = None
    result = None
    while meas is None or meas.steps + n <= iter_max:
        meas = ConformalMeasure(fmap, n, ends, vals, parent=meas)
        cdf = meas.cdf(xs)
        residual = float(np.max(np.abs(cdf - prev_cdf)))
        history.append((meas.steps, meas.s_hat, residual))
        result = MMEResult(meas, meas.s_hat, meas.steps, residual, residual <= tol, history)
        if residual <= tol:
            return result
        prev_cdf = cdf
    if strict:
        raise ConvergenceError("dual power iteration did not reach tolerance", result.residual, result)
    return result


def deepest_partition(fmap, lap_budget=DEFAULT_LAP_BUDGET, n_max=DEFAULT_ITER_MAX):
    """(n, ends, values) for the deepest f^n with at most ``lap_budget`` laps."""
    last = None
    try:
        for last in fmap.iter_lap_partitions(n_max, guard=lap_budget):
            pass
    except GuardExceeded:
        pass
    return last


def invariant_measure(result, lap_budget=DEFAULT_LAP_BUDGET):
    """The invariant MME from a converged :class:`MMEResult`."""
    conf = result.measure
    base = InvariantMeasure(conf)
    if base.is_conformal:
        return base
    _, ends, vals = deepest_partition(conf.fmap, lap_budget)
    if len(ends) <= len(conf.ends):
        return base
    return InvariantMeasure(conf, ends, vals)


def compute_mme(fmap, n=DEFAULT_GRID, iter_max=DEFAULT_ITER_MAX, tol=DEFAULT_TOL, lap_budget=DEFAULT_LAP_BUDGET,
                exact=True):
    """(GridMeasure of the maximal entropy measure, eigenvalue s_hat).

    The conformal measure comes from :func:`conformal_measure` and is pushed
    forward through the deepest lap partition within ``lap_budget``.  The
    returned table has ``n`` cells; with ``exact`` set its interval masses
    are evaluated exactly rather than interpolated.
    """
    res = conformal_measure(fmap, tol=tol, iter_max=iter_max, lap_budget=lap_budget)
    inv = invariant_measure(res, lap_budget)
    grid = inv.to_grid(n, exact=exact)
    grid.meta.update(iterations=res.iterations, residual=res.residual, s_hat=res.s_hat)
    return grid, res.s_hat


def jacobian_residual(fmap, measure, s_hat, n_sub=64):
    """max over laps L of f and subintervals A of L of |mu(f A) - s mu(A)| / mu(A)."""
    worst = 0.0
    ends, vals = fmap.lap_ends, fmap.lap_values
    for k in range(len(ends) - 1):
        a = np.linspace(ends[k], ends[k + 1], n_sub + 1)
        fa = fmap.evaluate(a)
        fa[0], fa[-1] = vals[k], vals[k + 1]
        m_a = measure.mass(a[:-1], a[1:])
        m_fa = measure.mass(np.minimum(fa[:-1], fa[1:]), np.maximum(fa[:-1], fa[1:]))
        ok = m_a > 0
        if np.any(~ok):
            return float("inf")
        worst = max(worst, float(np.max(np.abs(m_fa - s_hat * m_a) / m_a)))
    return worst


def invariance_residual(fmap, measure, tests=64):
    """max over test intervals A of |mu(f^{-1} A) - mu(A)|."""
    from .maps import IntervalQ

    edges = np.linspace(0.0, 1.0, tests + 1)
    worst = 0.0
    for a, b in zip(edges[:-1], edges[1:]):
        pre = fmap.branch_preimages(IntervalQ(a, b))
        m_pre = sum(float(measure.mass(w.lo, w.hi)) for w in pre)
        worst = max(worst, abs(m_pre - float(measure.mass(a, b))))
    return worst



def pullback_measure_bound_check(fmap, measure, s_hat, V, m, slack=1.05, guard=10**6, detail=False):
    """Constant-Jacobian bounds on every pull-back W of V by f^m.

    Checks ``s^-m mu(f^m W) <= slack mu(W)`` and
    ``mu(W) <= slack 2^D s^-m mu(f^m W)``, D being the number of chain
    intervals through W that meet a critical point.  ``measure`` should have
    constant Jacobian (the conformal measure).  With ``detail`` returns
    (ok, worst lower ratio, worst upper ratio) instead of a boolean.
    """
    from .pullback import pullback_levels

    if m == 0:
        return (True, 1.0, 1.0) if detail else True
    if V.length > 0.05 + 1e-15:
        raise ValueError("|V| must be at most 0.05")
    for k, lo, hi, D in pullback_levels(fmap, V, m, guard):
        pass
    img_lo, img_hi = lo.copy(), hi.copy()
    for _ in range(m):
        img_lo, img_hi = fmap.image_intervals(img_lo, img_hi)
    mu_w = measure.mass(lo, hi)
    mu_img = measure.mass(img_lo, img_hi) * s_hat ** (-m)
    with np.errstate(divide="ignore", invalid="ignore"):
        lower = np.where(mu_w > 0, mu_img / mu_w, np.inf)
        upper = np.where(mu_img > 0, mu_w / (2.0 ** D * mu_img), np.inf)
    ok = bool(np.all(lower <= slack) and np.all(upper <= slack))
    if detail:
        return ok, float(np.max(lower)), float(np.max(upper))
    return ok


# doubling diagnostics -------------------------------------------------------
def default_x_grid(n=2**10):
    return np.linspace(0.0, 1.0, n + 1)


def default_r_grid(N=DEFAULT_GRID, count=24, r_max=0.1):
    return np.geomspace(4.0 / N, r_max, count)


def _ratio(num, den):
    with np.errstate(divide="ignore", invalid="ignore"):
        return np.where(den > 0, num / np.where(den > 0, den, 1.0), np.where(num > 0, np.inf, 1.0))


@dataclass
class DoublingReport:
    """sup over the scan of mu(B_I(x, 2r)) / mu(B_I(x, r)).

    ``curve[i]`` is the sup over x at radius ``r_grid[i]``; ``r_star`` is the
    largest scanned radius, so ``C_star`` is the max of the whole curve.
    """

    C_star: float
    r_star: float
    worst_point: float
    worst_r: float
    r_grid: np.ndarray
    curve: np.ndarray
    argmax_x: np.ndarray

    def to_dict(self):
        return {
            "C_star": self.C_star,
            "r_star": self.r_star,
            "worst_point": self.worst_point,
            "worst_r": self.worst_r,
            "curve": [{"r": float(r), "sup_ratio": float(c), "x": float(x)}
                      for r, c, x in zip(self.r_grid, self.curve, self.argmax_x)],
        }

    def to_json(self):
        return dumps_json(self.to_dict())

    def to_csv(self):
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(["r", "sup_ratio", "x"])
        for r, c, x in zip(self.r_grid, self.curve, self.argmax_x):
            w.writerow([f17(r), f17(c), f17(x)])
        return buf.getvalue()


def doubling_constant(measure, r_grid=None, x_grid=None):
    r_grid = default_r_grid() if r_grid is None else np.asarray(r_grid, dtype=float)
    x_grid = default_x_grid() if x_grid is None else np.asarray(x_grid, dtype=float)
    curve = np.empty(len(r_grid))
    arg = np.empty(len(r_grid))
    for i, r in enumerate(r_grid):
        ratio = _ratio(measure.ball(x_grid, 2 * r), measure.ball(x_grid, r))
        j = int(np.argmax(ratio))
        curve[i], arg[i] = ratio[j], x_grid[j]
    i = int(np.argmax(curve))
    return DoublingReport(float(curve[i]), float(np.max(r_grid)), float(arg[i]), float(r_grid[i]), r_grid, curve, arg)


def adjacent_ratio_table(measure, eps_grid, x_grid):
    """Per-eps sup of max(q, 1/q), q = mu((x - eps, x)) / mu((x, x + eps)), and argmax x."""
    table = np.full(len(eps_grid), 1.0)
    arg = np.full(len(eps_grid), np.nan)
    for i, eps in enumerate(eps_grid):
        x = x_grid[(x_grid - eps >= 0.0) & (x_grid + eps <= 1.0)]
        if len(x) == 0:
            continue
        left, right = measure.mass(x - eps, x), measure.mass(x, x + eps)
        q = np.maximum(_ratio(left, right), _ratio(right, left))
        j = int(np.argmax(q))
        table[i], arg[i] = q[j], x[j]
    return table, arg


def adjacent_ratio_constant(measure, eps_grid=None, x_grid=None):
    eps_grid = default_r_grid() if eps_grid is None else np.asarray(eps_grid, dtype=float)
    x_grid = default_x_grid() if x_grid is None else np.asarray(x_grid, dtype=float)
    table, _ = adjacent_ratio_table(measure, eps_grid, x_grid)
    return float(np.max(table))


ALPHA_GRID = np.round(np.arange(0.1, 4.0 + 1e-9, 0.05), 10)


def polynomial_lower_bound_fit(measure, r_grid=None, x_grid=None, alpha_grid=ALPHA_GRID, slope_margin=0.025):
    """(C, alpha) with mu(B_I(x, r)) >= C r^alpha on the whole scan, or (None, None).

    alpha is the smallest grid value not below the log-log slope of
    min_x mu(B_I(x, r)) against r, fitted on the smaller half of the radii
    (less ``slope_margin`` for round-off); C is the best constant for it.
    No qualifying grid alpha, or a zero ball mass, is the failure marker.
    """
    r_grid = default_r_grid() if r_grid is None else np.sort(np.asarray(r_grid, dtype=float))
    x_grid = default_x_grid() if x_grid is None else np.asarray(x_grid, dtype=float)
    worst = np.array([float(np.min(measure.ball(x_grid, r))) for r in r_grid])
    if np.any(worst <= 0):
        return None, None
    half = max(len(r_grid) // 2, 2)
    slope = float(np.polyfit(np.log(r_grid[:half]), np.log(worst[:half]), 1)[0])
    ok = alpha_grid[alpha_grid >= slope - slope_margin]
    if len(ok) == 0:
        return None, None
    alpha = float(ok[0])
    C = float(np.min(worst / r_grid ** alpha))
    return C, alpha


def decade_maxima(grid, values, decades=3):
    """Max of ``values`` over the first ``decades`` decades of ``grid`` from its smallest point.

    Returns a list ordered from the smallest scales up; empty decades are skipped.
    """
    grid = np.asarray(grid, dtype=float)
    values = np.asarray(values, dtype=float)
    g0 = float(np.min(grid))
    out = []
    for d in range(decades):
        sel = (grid >= g0 * 10.0**d) & (grid < g0 * 10.0 ** (d + 1))
        if np.any(sel):
            out.append(float(np.max(values[sel])))
    return out


def growth_trend(grid, values, decades=3, factor=1.25):
    """True when the per-decade maxima rise toward small scales.

    Requires at least two populated decades, a non-decreasing sequence from
    larger to smaller scales, and a total rise by ``factor``; an infinite
    value at the smallest decade counts as growth.
    """
    m = decade_maxima(grid, values, decades)
    if len(m) < 2:
        return False
    if not np.isfinite(m[0]):
        return True
    rising = all(a >= b for a, b in zip(m[:-1], m[1:]))
    return bool(rising and m[0] >= factor * m[-1])


# serialisation ----------------------------------------------------------------
def f17(v):
    """CSV float: 17 significant digits, enough to round-trip any double."""
    return format(float(v), ".17g")


def jsonable(obj):
    """Recursively convert numpy scalars/arrays; non-finite floats become strings."""
    if isinstance(obj, dict):
        return {str(k): jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [jsonable(v) for v in obj]
    if isinstance(obj, np.ndarray):
        return [jsonable(v) for v in obj.tolist()]
    if isinstance(obj, (np.bool_, bool)):
        return bool(obj)
    if isinstance(obj, (np.integer,)):
        return int(obj)
    if isinstance(obj, (float, np.floating)):
        v = float(obj)
        return v if np.isfinite(v) else repr(v)
    return obj


def dumps_json(obj):
    return json.dumps(jsonable(obj), indent=2, sort_keys=True) + "\n"
