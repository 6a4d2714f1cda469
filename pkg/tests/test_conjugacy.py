import json
import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from intervalqs.conjugacy import SupportError, build_conjugacy, conjugacy_residual, qs_modulus
from intervalqs.mme import GridMeasure, adjacent_ratio_constant, compute_mme, default_r_grid, default_x_grid


def tent_map(y):
    return np.where(y <= 0.5, 2 * y, 2 - 2 * y)


@pytest.fixture(scope="module")
def profiles(mme_runs):
    out = {}
    for name, (res, _, nu) in mme_runs.items():
        out[name] = build_conjugacy(res.measure.fmap, nu, res.s_hat)
    return out


def test_tent_identity(profiles):
    p = profiles["tent2"]
    assert np.max(np.abs(p.F_samples - tent_map(p.y))) <= 1e-12
    x = np.linspace(0, 1, 1001)
    assert np.max(np.abs(p.h.cdf(x) - x)) <= 1e-12
    assert p.slope_residual <= 1e-6
    assert p.K == pytest.approx(1.0, abs=1e-6)
    assert p.conj_residual <= 1e-9


def test_logistic_conjugate_to_tent(profiles):
    p = profiles["logistic4"]
    assert np.max(np.abs(p.F_samples - tent_map(p.y))) <= 1e-3
    assert p.h.cdf(0.5) == pytest.approx(0.5, abs=1e-12)
    assert p.F(0.5) == pytest.approx(1.0, abs=1e-9)
    assert p.K == pytest.approx(2.414, abs=0.05)
    assert p.K_eps in [row[0] for row in p.qs_table]
    assert p.conj_residual <= 2e-3
    assert p.slope_residual <= 1e-2


def test_slope3_affine(profiles, slope3):
    p = profiles["slope3"]
    assert np.max(np.abs(p.F_samples - slope3.evaluate(p.y))) <= 1e-12
    assert p.slope_residual <= 1e-6


def test_fibonacci_piecewise_affine_but_not_qs(profiles):
    # through the conformal measure F is affine with slopes +-s, yet K grows
    p = profiles["fibonacci_logistic"]
    assert p.slope_residual <= 1e-6
    assert p.conj_residual <= 1e-6
    assert p.K > 64 and p.K_growth()


def test_wrong_slope_is_caught(mme_runs):
    res, _, nu = mme_runs["logistic4"]
    p = build_conjugacy(res.measure.fmap, nu, 2.2)
    assert p.conj_residual > 0.05
    assert p.slope_residual > 0.05


@pytest.mark.parametrize("name", ["tent2", "logistic4", "slope3", "fibonacci_logistic"])
def test_profile_invariants(profiles, name):
    p = profiles[name]
    h = p.h
    assert h.cdf(0.0) == 0.0 and h.cdf(1.0) == pytest.approx(1.0, abs=1e-15)
    assert np.all(np.diff(h.cdf_values) > 0)
    x = h.partition
    # h_inv o h = id within two grid cells
    assert np.max(np.abs(p.h_inv(h.cdf(x)) - x)) <= 2.0 / h.n_cells
    assert p.K >= 1


@pytest.mark.parametrize("name", ["tent2", "logistic4", "slope3", "fibonacci_logistic"])
def test_slope_sign_alternates_at_turning_images(profiles, name):
    p = profiles[name]
    n = len(p.y) - 1
    d = np.diff(p.F_samples)
    breaks = np.concatenate([[0.0], p.turning_images, [1.0]])
    cell_mid = 0.5 * (p.y[:-1] + p.y[1:])
    lap = np.searchsorted(breaks, cell_mid) - 1
    near = np.zeros(n, dtype=bool)
    for t in p.turning_images:
        k = int(t * n)
        near[max(k - 1, 0):k + 2] = True
    assert np.all(np.sign(d[~near]) == p.lap_signs[lap[~near]])


def test_qs_examples():
    K, table = qs_modulus(lambda x: x)
    assert K == pytest.approx(1.0, abs=1e-12)
    K, _ = qs_modulus(lambda x: 2 / np.pi * np.arcsin(np.sqrt(x)))
    assert K == pytest.approx(1 / (math.sqrt(2) - 1), abs=0.05)
    # h = x^2 at x = eps: (4 - 1) eps^2 / eps^2
    K, _ = qs_modulus(lambda x: x**2, [0.01], [0.01])
    assert K == pytest.approx(3.0)


def test_qs_equals_adjacent_ratio(mme_runs):
    rg, xg = default_r_grid(), default_x_grid()
    for _, (_, mu, _) in mme_runs.items():
        K, _ = qs_modulus(mu, rg, xg)
        assert K == adjacent_ratio_constant(mu, rg, xg)


def test_qs_diverges_for_atom_like_measure():
    p = np.linspace(0, 1, 2**14 + 1)
    # nearly all mass piles up at 1/3 inside a width-1e-6 window
    c = 0.001 * p + 0.999 * np.clip((p - 1 / 3) / 1e-6 + 0.5, 0, 1)
    mu = GridMeasure(p, c)
    rg = np.geomspace(4 / 2**14, 0.1, 24)
    xg = np.linspace(0, 1, 2**12 + 1)
    K, table = qs_modulus(mu, rg, xg)
    sups = [row[1] for row in table]
    assert K > 100
    assert sups[0] > sups[-1]


@given(st.lists(st.floats(0.05, 20.0), min_size=4, max_size=40))
def test_qs_bounded_by_mass_ratio(weights):
    # K never exceeds the largest ratio of neighbouring cell masses times a constant
    w = np.asarray(weights)
    c = np.concatenate([[0.0], np.cumsum(w) / w.sum()])
    mu = GridMeasure(np.linspace(0, 1, len(w) + 1), c)
    K, _ = qs_modulus(mu, [1.0 / len(w)], np.linspace(0, 1, len(w) + 1))
    assert 1.0 <= K <= w.max() / w.min() + 1e-9


def test_support_error(logistic):
    p = np.linspace(0, 1, 5)
    mu = GridMeasure(p, np.array([0.0, 0.5, 0.5, 0.75, 1.0]))
    with pytest.raises(SupportError):
        build_conjugacy(logistic, mu, 2.0)


def test_exports(profiles, logistic):
    p = profiles["logistic4"]
    assert p.F_csv().startswith("y,F\n") and p.h_csv().startswith("x,cdf\n")
    assert len(p.F_csv().strip().split("\n")) == 2**12 + 2
    d = json.loads(p.to_json())
    assert set(d) >= {"K", "slope_residual", "conj_residual", "s"}
    assert conjugacy_residual(logistic, p) == p.conj_residual
