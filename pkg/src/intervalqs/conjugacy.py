"""Conjugacy of f to a piecewise affine model through the measure cdf.

h(x) = mu([0, x]) is a homeomorphism of [0, 1] when mu has full support.
For a measure with constant Jacobian s the conjugated map F = h o f o h^-1
is piecewise affine with slopes +-s, breaking at the h-images of the
turning points.  The quasi-symmetry modulus of h is the sup of
|h(x + eps) - h(x)| / |h(x) - h(x - eps)| and its inverse over the scan.
"""
from __future__ import annotations

import csv
import io
from dataclasses import dataclass, field

import numpy as np

from .mme import (adjacent_ratio_table, default_r_grid, default_x_grid, dumps_json,
                  f17, growth_trend)

F_SAMPLES = 2**12


class SupportError(ValueError):
    """h is not strictly increasing: the measure misses part of [0, 1]."""


class _CallableCdf:
    """Adapter so plain callables can be scanned like a measure."""

    def __init__(self, func):
        self.func = func

    def cdf(self, x):
        return np.asarray(self.func(np.asarray(x, dtype=float)), dtype=float)

    def mass(self, a, b):
        return self.cdf(b) - self.cdf(a)


def _as_measure(h):
    return h if hasattr(h, "mass") else _CallableCdf(h)


def qs_modulus(h, eps_grid=None, x_grid=None):
    """(K, qs_table) for the homeomorphism h (a cdf-like measure or a callable).

    ``qs_table`` rows are (eps, sup ratio, x at the sup).  Points with
    x +- eps outside [0, 1] are skipped.
    """
    eps_grid = default_r_grid() if eps_grid is None else np.asarray(eps_grid, dtype=float)
    x_grid = default_x_grid() if x_grid is None else np.asarray(x_grid, dtype=float)
    sup, arg = adjacent_ratio_table(_as_measure(h), eps_grid, x_grid)
    table = [(float(e), float(k), float(x)) for e, k, x in zip(eps_grid, sup, arg)]
    return float(np.max(sup)), table


def _model(breaks, signs, s, f0):
    """Piecewise affine map with slope signs[k] * s on [breaks[k], breaks[k+1]], F(0) = f0."""
    knots = np.concatenate([[f0], f0 + np.cumsum(signs * s * np.diff(breaks))])
    return lambda y: np.interp(y, breaks, knots)


@dataclass
class ConjugacyProfile:
    """Sampled h, F = h o f o h^-1 and their statistics.

    ``turning_images`` are h(turning points); ``model`` is the piecewise
    affine map with slopes +-s through them anchored at F(0).
    """

    fmap: object
    h: object
    s: float
    y: np.ndarray
    F_samples: np.ndarray
    slope_residual: float
    turning_images: np.ndarray
    lap_signs: np.ndarray
    K: float = np.nan
    K_eps: float = np.nan
    qs_table: list = field(default_factory=list)
    conj_residual: float = np.nan

    def h_inv(self, y):
        return self.h.inverse_cdf(y)

    def F(self, y):
        return np.interp(y, self.y, self.F_samples)

    def model(self, y):
        breaks = np.concatenate([[0.0], self.turning_images, [1.0]])
        return _model(breaks, self.lap_signs, self.s, self.F_samples[0])(y)

    def K_growth(self, decades=3):
        if not self.qs_table:
            return False
        eps = [row[0] for row in self.qs_table]
        return growth_trend(eps, [row[1] for row in self.qs_table], decades)

    def h_csv(self):
        return self.h.to_csv()

    def F_csv(self):
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(["y", "F"])
        for y, v in zip(self.y, self.F_samples):
            w.writerow([f17(y), f17(v)])
        return buf.getvalue()

    def summary(self):
        return {"K": self.K, "K_eps": self.K_eps, "slope_residual": self.slope_residual,
                "conj_residual": self.conj_residual, "s": self.s}

    def to_json(self):
        return dumps_json(self.summary())


def build_conjugacy(fmap, mu, s_hat, n_samples=F_SAMPLES, eps_grid=None, x_grid=None):
    """ConjugacyProfile of f through h = cdf of ``mu`` (a GridMeasure).

    For the slopes to be +-s, ``mu`` must have constant Jacobian s; for maps
    whose laps are not all full this is the conformal measure, not the
    invariant one.
    """
    masses = mu.cell_masses()
    if np.any(masses <= 0):
        bad = int(np.argmin(masses))
        raise SupportError(f"h is not strictly increasing on cell [{mu.partition[bad]!r}, {mu.partition[bad + 1]!r}]")
    y = np.linspace(0.0, 1.0, n_samples + 1)
    F = mu.cdf(fmap.evaluate(mu.inverse_cdf(y)))
    turning = np.asarray(fmap.lap_ends[1:-1], dtype=float)
    t_img = np.sort(mu.cdf(turning)) if len(turning) else np.empty(0)
    slopes = np.abs(np.diff(F)) / np.diff(y)
    keep = np.ones(n_samples, dtype=bool)
    for t in t_img:
        k = min(int(np.floor(t * n_samples)), n_samples - 1)
        keep[max(k - 1, 0):k + 2] = False
    rel = np.abs(slopes[keep] - s_hat) / s_hat
    slope_residual = float(rel.max()) if len(rel) else 0.0
    signs = np.where(np.asarray(fmap.lap_increasing, dtype=bool), 1.0, -1.0)
    prof = ConjugacyProfile(fmap, mu, float(s_hat), y, F, slope_residual, t_img, signs)
    eps_grid = default_r_grid() if eps_grid is None else eps_grid
    prof.K, prof.qs_table = qs_modulus(mu, eps_grid, x_grid)
    prof.K_eps = max(prof.qs_table, key=lambda row: row[1])[0]
    prof.conj_residual = conjugacy_residual(fmap, prof)
    return prof


def conjugacy_residual(fmap, profile, n_points=F_SAMPLES):
    """max over a uniform x grid of |h(f(x)) - F(h(x))|, F the affine model with slopes +-s."""
    x = np.linspace(0.0, 1.0, n_points + 1)
    hx = profile.h.cdf(x)
    return float(np.max(np.abs(profile.h.cdf(fmap.evaluate(x)) - profile.model(hx))))
