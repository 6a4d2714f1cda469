"""Run the four equivalent conditions on one map and compare the verdicts.

(1) semi-hyperbolicity: the pull-back criticality curve plateaus at a small D.
(2) non-recurrence: every critical orbit stays a fixed distance from its start.
(3) the maximal entropy measure is doubling.
(4) h = cdf conjugates f to a piecewise affine map and is quasi-symmetric.

The conditions are asymptotic, so each verdict is taken at a declared budget
against declared thresholds; both are recorded in the report.
"""
from __future__ import annotations

import dataclasses
from dataclasses import dataclass
from importlib import resources

import numpy as np
import yaml

from .conjugacy import build_conjugacy
from .errors import ScreenFailure
from .maps import MultimodalMap
from .mme import (conformal_measure, decade_maxima, default_r_grid, default_x_grid,
                  doubling_constant, dumps_json, growth_trend, invariant_measure, jsonable)
from .pullback import closest_return, semi_hyperbolicity_scan
from .symbolic import is_topologically_exact, repelling_screen, topological_entropy, uniform_hyperbolicity_lower

SCHEMA_VERSION = "1.0"
ENTROPY_AGREEMENT = 1e-3


@dataclass
class Budgets:
    """Numerical budgets and verdict thresholds (all configuration)."""

    entropy_depth: int = 24
    entropy_lap_guard: int = 2**21
    exactness_depth: int = 10
    exactness_n_max: int = 50
    period_max: int = 8
    grid_n: int = 2**12
    exact_cdf: bool = True
    iter_max: int = 200
    tol: float = 1e-6
    lap_budget: int = 2**22
    x_grid: int = 2**10
    r_count: int = 24
    r_max: float = 0.1
    growth_decades: int = 3
    crit_radius: float = 0.1
    scan_depth: int = 48
    scan_grid: int = 2**10
    criticality_set: str = "turning"
    plateau_window: int = 5
    D_max: int = 4
    recurrence_n_max: int = 10**4
    gap_threshold: float = 1e-3
    C_threshold: float = 64.0
    K_threshold: float = 64.0
    slope_threshold: float = 1e-2

    def to_dict(self):
        return dataclasses.asdict(self)

    @classmethod
    def field_types(cls):
        return {f.name: type(f.default) for f in dataclasses.fields(cls)}


def recurrence_gap(fmap, c, n_max=10**4):
    """min over 1 <= n <= n_max of |f^n(c) - c| for a critical point (or location) c."""
    if n_max > 10**6:
        raise ValueError("n_max must be <= 10**6")
    x = getattr(c, "location", c)
    return float(closest_return(fmap, float(x), n_max)[0])


def closest_returns(fmap, c, n_max=10**4):
    """Record-breaking returns [(n, |f^n(c) - c|), ...] of the critical orbit."""
    c = float(getattr(c, "location", c))
    x, best, out = c, np.inf, []
    for n in range(1, n_max + 1):
        x = fmap.eval(x)
        g = abs(x - c)
        if g < best:
            best = g
            out.append((n, g))
    return out


@dataclass
class ClassificationReport:
    map: dict
    entropy: dict
    screens: dict
    mme: dict
    cond1: dict
    cond2: dict
    cond3: dict
    cond4: dict
    budgets: dict
    schema_version: str = SCHEMA_VERSION

    @property
    def verdicts(self):
        return [self.cond1["verdict"], self.cond2["verdict"], self.cond3["verdict"], self.cond4["verdict"]]

    @property
    def consistent(self):
        return len(set(self.verdicts)) == 1

    def to_dict(self):
        d = {f.name: getattr(self, f.name) for f in dataclasses.fields(self)}
        d["consistent"] = self.consistent
        d["diagnostics"] = cross_validate(self)
        return jsonable(d)

    def to_json(self):
        return dumps_json(self.to_dict())


def screen(fmap, budgets):
    """Class screens: exactness certificate and repelling periodic orbits.

    Returns the screen record; raises :class:`ScreenFailure` on failure.
    """
    ex = is_topologically_exact(fmap, budgets.exactness_depth, budgets.exactness_n_max)
    if not ex:
        raise ScreenFailure(f"no exactness certificate: {ex.witness!r} does not cover [0, 1] "
                            f"within {ex.n_max} steps")
    count = repelling_screen(fmap, budgets.period_max)
    return {"exact": True, "exactness_steps": ex.max_steps, "exactness_depth": ex.depth,
            "periodic_orbits_checked": count,
            "min_multiplier_root": uniform_hyperbolicity_lower(fmap, budgets.period_max)}


def measures(fmap, budgets):
    """(conformal run, invariant grid, conformal grid) at the budgeted grid size.

    The invariant measure is the maximal entropy measure; the conformal one
    has constant Jacobian and is what h must be built from.  They coincide
    when every lap of f is full.
    """
    res = conformal_measure(fmap, tol=budgets.tol, iter_max=budgets.iter_max, lap_budget=budgets.lap_budget)
    inv = invariant_measure(res, budgets.lap_budget)
    mu = inv.to_grid(budgets.grid_n, exact=budgets.exact_cdf)
    nu = mu if inv.is_conformal else res.measure.to_grid(budgets.grid_n, exact=budgets.exact_cdf)
    return res, mu, nu


def classify(fmap, budgets=None):
    b = budgets or Budgets()
    scr = screen(fmap, b)
    ent = topological_entropy(fmap, b.entropy_depth, guard=b.entropy_lap_guard, cap=True)
    res, mu, nu = measures(fmap, b)
    agree = abs(ent.s - res.s_hat) / res.s_hat
    entropy = {"h_top": ent.h_top, "s": ent.s, "lap_depth": len(ent.lap_counts), "s_hat": res.s_hat,
               "relative_gap": agree, "agree": bool(agree <= ENTROPY_AGREEMENT)}
    mme = {"iterations": res.iterations, "residual": res.residual, "converged": res.converged,
           "conformal_is_invariant": nu is mu, "grid_cells": mu.n_cells}

    scan = semi_hyperbolicity_scan(fmap, r=b.crit_radius, n_max=b.scan_depth, grid_size=b.scan_grid,
                                   criticality_set=b.criticality_set, window=b.plateau_window, D_max=b.D_max)
    cond1 = {"verdict": scan.semi_hyperbolic, "D": scan.D, "r": scan.r, "plateau": scan.plateau,
             "curve": scan.curve[1:].tolist(), "effective_n_max": scan.effective_n_max,
             "D_max": b.D_max, "argmax_x": scan.argmax_x}

    gaps = [{"c": cp.location, "gap": recurrence_gap(fmap, cp, b.recurrence_n_max)}
            for cp in fmap.critical_points]
    cond2 = {"verdict": all(g["gap"] >= b.gap_threshold for g in gaps), "gaps": gaps,
             "threshold": b.gap_threshold, "n_max": b.recurrence_n_max}

    r_grid = default_r_grid(b.grid_n, b.r_count, b.r_max)
    x_grid = default_x_grid(b.x_grid)
    dbl = doubling_constant(mu, r_grid, x_grid)
    dgrow = growth_trend(r_grid, dbl.curve, b.growth_decades)
    cond3 = {"verdict": bool(np.isfinite(dbl.C_star) and dbl.C_star <= b.C_threshold and not dgrow),
             "C_star": dbl.C_star, "r_star": dbl.r_star, "worst_r": dbl.worst_r, "worst_point": dbl.worst_point,
             "growth": dgrow, "decade_maxima": decade_maxima(r_grid, dbl.curve, b.growth_decades),
             "threshold": b.C_threshold}

    prof = build_conjugacy(fmap, nu, res.s_hat, eps_grid=r_grid, x_grid=x_grid)
    kgrow = prof.K_growth(b.growth_decades)
    cond4 = {"verdict": bool(np.isfinite(prof.K) and prof.K <= b.K_threshold and not kgrow
                             and prof.slope_residual <= b.slope_threshold),
             "K": prof.K, "K_eps": prof.K_eps, "slope_residual": prof.slope_residual,
             "conj_residual": prof.conj_residual, "growth": kgrow,
             "decade_maxima": decade_maxima(r_grid, [row[1] for row in prof.qs_table], b.growth_decades),
             "threshold": b.K_threshold}

    report = ClassificationReport(fmap.descriptor(), entropy, scr, mme, cond1, cond2, cond3, cond4, b.to_dict())
    report.artifacts = {"mu": mu, "nu": nu, "doubling": dbl, "profile": prof, "scan": scan}
    return report


# which budget to raise when two conditions disagree, keyed by (i, j, verdict_i)
_ADVICE = {
    (1, 2, True): "raise n_max for recurrence",
    (1, 2, False): "raise scan depth or lower the criticality radius",
    (1, 3, True): "raise grid N",
    (1, 3, False): "raise scan depth or lower the criticality radius",
    (3, 2, True): "raise grid N",
    (3, 2, False): "raise n_max for recurrence",
    (3, 4, True): "raise grid N",
    (3, 4, False): "raise grid N",
}


def cross_validate(report):
    """Diagnostics for each implication of the equivalence that the verdicts break."""
    v = dict(zip((1, 2, 3, 4), report.verdicts if hasattr(report, "verdicts") else
                 [report[f"cond{i}"]["verdict"] for i in (1, 2, 3, 4)]))
    out = []
    for (i, j, vi), advice in _ADVICE.items():
        if v[i] == vi and v[j] != vi:
            out.append(f"cond{i}={str(vi).lower()} but cond{j}={str(v[j]).lower()}: {advice}")
    return out


# corpus -------------------------------------------------------------------------
def load_corpus():
    text = resources.files("intervalqs").joinpath("corpus/corpus.yaml").read_text(encoding="utf-8")
    return yaml.safe_load(text)["maps"]


def corpus_map(name):
    for entry in load_corpus():
        if entry["name"] == name:
            return MultimodalMap.from_descriptor(entry["family"], entry["params"], entry.get("critical_orders"))
    raise KeyError(name)


def corpus_maps():
    return {e["name"]: MultimodalMap.from_descriptor(e["family"], e["params"], e.get("critical_orders"))
            for e in load_corpus()}
