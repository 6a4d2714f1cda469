import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from intervalqs.errors import GuardExceeded, ScreenFailure
from intervalqs.maps import MultimodalMap, identity_like_map
from intervalqs.symbolic import (is_topologically_exact, lap_counts, periodic_points, repelling_screen,
                                 topological_entropy, uniform_hyperbolicity_lower)


def full_affine(k):
    """k full affine branches with slopes +-k."""
    slopes = [k * (-1) ** i for i in range(k)]
    return MultimodalMap.piecewise_affine([i / k for i in range(1, k)], slopes)


# entropy ----------------------------------------------------------------------
def test_entropy_examples(tent, logistic):
    e = topological_entropy(tent, 16)
    # exact up to round-off in the regression
    assert e.h_top == pytest.approx(math.log(2), abs=1e-12)
    assert e.residual <= 1e-12 and e.s == pytest.approx(2.0, abs=1e-12)
    assert topological_entropy(logistic, 16).h_top == pytest.approx(math.log(2), abs=1e-6)
    assert topological_entropy(full_affine(3), 12).h_top == pytest.approx(math.log(3), abs=1e-6)


def test_fibonacci_lap_counts(fibonacci):
    # frozen: lap(f^n) for the recurrent corpus map
    assert lap_counts(fibonacci, 16) == [2, 4, 7, 13, 23, 40, 71, 123, 214, 372, 643, 1116, 1931, 3340,
                                         5782, 9997]


def test_entropy_guard_and_cap(tent):
    with pytest.raises(GuardExceeded):
        topological_entropy(tent, 16, guard=1000)
    e = topological_entropy(tent, 16, guard=1000, cap=True)
    assert len(e.lap_counts) == 9 and e.s == pytest.approx(2.0, abs=1e-12)
    with pytest.raises(ValueError):
        topological_entropy(tent, 3)


@given(st.integers(2, 5))
def test_constant_slope_full_maps(k):
    n = {2: 16, 3: 12, 4: 9, 5: 8}[k]
    e = topological_entropy(full_affine(k), n)
    assert e.h_top == pytest.approx(math.log(k), abs=1e-6)


@pytest.mark.parametrize("s", [1.3, 1.5, 1.8])
def test_truncated_tent_entropy_converges(s):
    # non-full constant-slope maps: the lap regression converges to log s,
    # but only at rate O(1/n) (see notes), so we check the trend
    errs = [abs(topological_entropy(MultimodalMap.tent(s), n).h_top - math.log(s)) for n in (8, 12, 16, 20)]
    assert all(a > b for a, b in zip(errs, errs[1:]))
    assert errs[-1] < 0.05


MAPS = [MultimodalMap.tent(2.0), MultimodalMap.tent(1.6), MultimodalMap.logistic(4.0),
        MultimodalMap.logistic(3.9124069991432481), full_affine(3)]


@given(st.sampled_from(range(len(MAPS))), st.integers(4, 12))
def test_entropy_estimate_invariants(i, n):
    e = topological_entropy(MAPS[i], n)
    assert e.h_top >= 0 and e.s >= 1 and e.residual >= 0
    assert e.s == pytest.approx(math.exp(e.h_top))


@given(st.sampled_from(range(len(MAPS))))
def test_lap_submultiplicative(i):
    laps = [None] + lap_counts(MAPS[i], 10)
    for n in range(1, 10):
        for m in range(1, 11 - n):
            assert laps[n + m] <= laps[n] * laps[m]


# exactness ----------------------------------------------------------------------
def test_exactness_examples(tent, logistic, fibonacci):
    r = is_topologically_exact(tent, 10, 20)
    assert r and r.max_steps <= 11
    assert is_topologically_exact(logistic, 8, 30)
    assert is_topologically_exact(fibonacci, 10, 50)
    bad = is_topologically_exact(identity_like_map(), 6, 20)
    assert not bad and bad.witness.length == pytest.approx(2.0**-6)
    with pytest.raises(ValueError):
        is_topologically_exact(tent, 21, 5)


# periodic orbits ----------------------------------------------------------------
def test_periodic_examples(tent, logistic):
    fixed = periodic_points(logistic, 1)
    assert [o.points[0] for o in fixed] == pytest.approx([0.0, 0.75])
    assert [o.multiplier for o in fixed] == pytest.approx([4.0, 2.0])
    (two,) = periodic_points(logistic, 2)
    assert two.points == pytest.approx(((5 - math.sqrt(5)) / 8, (5 + math.sqrt(5)) / 8))
    assert two.multiplier == pytest.approx(4.0)
    tfix = periodic_points(tent, 1)
    assert [o.points[0] for o in tfix] == pytest.approx([0.0, 2 / 3])
    assert [o.multiplier for o in tfix] == [2.0, 2.0]


def test_chebyshev_orbit_count(logistic):
    # 4x(1-x) has 2^n points of period dividing n; 30 orbits of exact period 8
    assert len(periodic_points(logistic, 8)) == 30


@given(st.sampled_from(range(len(MAPS))), st.integers(1, 6))
def test_periodic_orbit_invariants(i, n):
    f = MAPS[i]
    for orb in periodic_points(f, n):
        pts = np.asarray(orb.points)
        assert len(pts) == n
        assert np.max(np.abs(f.iterate(pts, n) - pts)) <= 1e-9
        mults = np.abs(f.deriv_iterate(pts, n))
        assert np.allclose(mults, orb.multiplier, rtol=1e-6)
        assert orb.multiplier > 1


def test_uniform_hyperbolicity(tent, logistic):
    assert uniform_hyperbolicity_lower(logistic, 8) == pytest.approx(2.0, abs=1e-6)
    assert uniform_hyperbolicity_lower(tent, 8) == 2.0
    assert uniform_hyperbolicity_lower(MultimodalMap.tent(1.5), 8) == 1.5


def test_screen_rejects_attracting_cycles():
    with pytest.raises(ScreenFailure, match="period-2"):
        repelling_screen(MultimodalMap.logistic(3.3))
    # a saddle-node pair inside one lap of f^3
    with pytest.raises(ScreenFailure, match="period-3"):
        repelling_screen(MultimodalMap.logistic(3.83))


def test_screen_passes_corpus(corpus):
    for f in corpus.values():
        assert repelling_screen(f, 8) > 0
