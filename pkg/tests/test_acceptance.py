"""Acceptance criteria, one test each.

Every test prints ``criterion N: PASS`` or ``criterion N: FAIL`` and the
lines are repeated in the pytest terminal summary.  Run standalone with
``python tests/test_acceptance.py``.
"""
import dataclasses
import functools
import math
import time

import numpy as np
import pytest

from intervalqs.classify import Budgets, classify, corpus_map, corpus_maps, measures, recurrence_gap
from intervalqs.cli import OUTPUT_ENV, main
from intervalqs.conjugacy import build_conjugacy, qs_modulus
from intervalqs.maps import IntervalQ
from intervalqs.mme import (adjacent_ratio_constant, compute_mme, decade_maxima, default_r_grid, default_x_grid,
                            doubling_constant, growth_trend, invariance_residual, jacobian_residual,
                            pullback_measure_bound_check)
from intervalqs.pullback import esc_rate, semi_hyperbolicity_scan
from intervalqs.symbolic import repelling_screen, topological_entropy, uniform_hyperbolicity_lower

RESULTS = {}
LOG2 = math.log(2.0)


def criterion(number, seconds=None):
    """Record PASS/FAIL for the wrapped test and enforce its runtime limit."""

    def wrap(fn):
        @functools.wraps(fn)
        def run(*args, **kwargs):
            t0 = time.perf_counter()
            try:
                fn(*args, **kwargs)
                dt = time.perf_counter() - t0
                if seconds is not None:
                    assert dt <= seconds, f"runtime {dt:.1f} s over the {seconds} s limit"
            except BaseException as exc:
                RESULTS[number] = f"criterion {number}: FAIL ({type(exc).__name__}: {str(exc).splitlines()[0] if str(exc) else ''})"
                print(RESULTS[number])
                raise
            RESULTS[number] = f"criterion {number}: PASS ({time.perf_counter() - t0:.1f} s)"
            print(RESULTS[number])

        return run

    return wrap


def tent_values(y):
    return np.where(y <= 0.5, 2 * y, 2 - 2 * y)


def arcsin_cdf(x):
    return 2 / np.pi * np.arcsin(np.sqrt(x))


@criterion(1, seconds=5)
def test_criterion_1_tent_identity():
    f = corpus_map("tent2")
    ent = topological_entropy(f, 20)
    assert ent.h_top == pytest.approx(LOG2, abs=1e-6)
    g, s = compute_mme(f)
    x = np.linspace(0, 1, 10001)
    assert np.max(np.abs(g.cdf(x) - x)) <= 1e-6
    prof = build_conjugacy(f, g, s)
    assert np.max(np.abs(prof.h.cdf(x) - x)) <= 1e-6
    assert prof.K == pytest.approx(1.0, abs=1e-6)
    assert prof.slope_residual <= 1e-6
    rep = classify(f)
    assert rep.verdicts == [True] * 4 and rep.consistent


@criterion(2, seconds=60)
def test_criterion_2_logistic_oracles():
    f = corpus_map("logistic4")
    assert topological_entropy(f, 20).h_top == pytest.approx(LOG2, abs=1e-3)
    g, s = compute_mme(f, 2**12)
    x = np.linspace(0, 1, 10001)
    assert np.max(np.abs(g.cdf(x) - arcsin_cdf(x))) <= 1e-3
    assert g.cdf(0.25) == pytest.approx(1 / 3, abs=1e-3)
    assert g.cdf(0.5) == pytest.approx(0.5, abs=1e-3)
    assert s == pytest.approx(2.0, abs=1e-3)
    prof = build_conjugacy(f, g, s)
    assert np.max(np.abs(prof.F_samples - tent_values(prof.y))) <= 1e-3
    assert prof.K == pytest.approx(2.414, abs=0.05)
    assert jacobian_residual(f, g, s) <= 1e-3
    rep = classify(f)
    assert rep.verdicts == [True] * 4


TEST_INTERVALS = [IntervalQ(0.02 + 0.12 * k, 0.07 + 0.12 * k) for k in range(8)]


@criterion(3)
def test_criterion_3_constant_jacobian():
    b = Budgets()
    for name, f in corpus_maps().items():
        res, mu, nu = measures(f, b)
        assert invariance_residual(f, mu, 64) <= 5 * b.tol, name
        for V in TEST_INTERVALS:
            for m in range(7):
                ok, lo, hi = pullback_measure_bound_check(f, nu, res.s_hat, V, m, slack=1.05, detail=True)
                assert ok, (name, V, m, lo, hi)


@criterion(4, seconds=120)
def test_criterion_4_plateau():
    for name in ("logistic4", "tent2"):
        t0 = time.perf_counter()
        scan = semi_hyperbolicity_scan(corpus_map(name), r=0.01, n_max=20, grid_size=2**10)
        assert time.perf_counter() - t0 <= 60, name
        assert scan.effective_n_max == 20, name
        assert scan.curve[1:].max() <= 2, name
        assert scan.curve[20] == scan.curve[15], name


@criterion(5)
def test_criterion_5_esc_rates():
    assert esc_rate(corpus_map("tent2"), 2.0**-6, 14) == pytest.approx(2.0, abs=1e-6)
    assert esc_rate(corpus_map("slope3"), 2.0**-6, 10) == pytest.approx(3.0, abs=1e-6)
    assert esc_rate(corpus_map("logistic4"), 2.0**-6, 12) >= 1.5


@criterion(6)
def test_criterion_6_measure_equivalence():
    g, _ = compute_mme(corpus_map("logistic4"), 2**12)
    rg, xg = default_r_grid(), default_x_grid()
    Cs = doubling_constant(g, rg, xg).C_star
    C = adjacent_ratio_constant(g, rg, xg)
    assert np.isfinite(Cs) and np.isfinite(C)
    assert Cs <= 1 + C
    assert C <= Cs**2


@criterion(7)
def test_criterion_7_uniform_hyperbolicity():
    assert uniform_hyperbolicity_lower(corpus_map("logistic4"), 8) == pytest.approx(2.0, abs=1e-3)
    for name, f in corpus_maps().items():
        assert repelling_screen(f, 8) > 0, name
        assert uniform_hyperbolicity_lower(f, 8) > 1, name


# the three smallest decades of the r / eps grid need N = 2^16 (4/N = 6.1e-5)
DECADE_GRID = 2**16


@criterion(8, seconds=300)
def test_criterion_8_negative_control():
    f = corpus_map("fibonacci_logistic")
    b = Budgets()
    assert recurrence_gap(f, f.critical_points[0], 10**4) <= 1e-3
    scan = semi_hyperbolicity_scan(f, r=b.crit_radius, n_max=b.scan_depth, grid_size=b.scan_grid,
                                   window=b.plateau_window, D_max=b.D_max)
    assert scan.D > 4
    _, mu, nu = measures(f, dataclasses.replace(b, grid_n=DECADE_GRID))
    rg, xg = default_r_grid(DECADE_GRID), default_x_grid(b.x_grid)
    assert rg[0] * 1000 <= rg[-1]
    C_curve = doubling_constant(mu, rg, xg).curve
    _, table = qs_modulus(nu, rg, xg)
    K_curve = [row[1] for row in table]
    assert len(decade_maxima(rg, C_curve, 3)) == 3
    assert growth_trend(rg, C_curve, 3), decade_maxima(rg, C_curve, 3)
    assert growth_trend(rg, K_curve, 3), decade_maxima(rg, K_curve, 3)
    rep = classify(f, b)
    assert rep.verdicts == [False] * 4 and rep.consistent


@criterion(9)
def test_criterion_9_determinism(tmp_path, monkeypatch):
    cfg = tmp_path / "logistic.yaml"
    cfg.write_text("family: logistic\nparams: [4]\n", encoding="utf-8")
    blobs = []
    for k in range(2):
        out = tmp_path / f"run{k}"
        monkeypatch.setenv(OUTPUT_ENV, str(out))
        assert main(["classify", str(cfg)]) == 0
        blobs.append((out / "report.json").read_bytes())
    assert blobs[0] == blobs[1]


if __name__ == "__main__":
    import sys

    sys.exit(pytest.main([__file__, "-q", "-s"]))
