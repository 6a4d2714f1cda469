import dataclasses
import json

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from intervalqs.classify import (Budgets, classify, closest_returns, corpus_map, cross_validate, load_corpus,
                                 recurrence_gap)
from intervalqs.errors import ScreenFailure
from intervalqs.maps import MultimodalMap

from .conftest import FIB_A


@pytest.fixture(scope="module")
def reports(corpus):
    return {name: classify(f) for name, f in corpus.items()}


def test_corpus_verdicts_and_consistency(reports):
    expected = {e["name"]: e["expected"] for e in load_corpus()}
    for name, rep in reports.items():
        assert rep.consistent, (name, rep.verdicts)
        assert rep.verdicts == [expected[name]] * 4, name
        assert cross_validate(rep) == []


def test_tent_report(reports):
    rep = reports["tent2"]
    assert rep.cond4["K"] == pytest.approx(1.0, abs=1e-6)
    assert rep.cond3["C_star"] < 64
    assert rep.cond2["gaps"][0]["gap"] == 0.5
    assert rep.entropy["agree"]


def test_fibonacci_report(reports):
    rep = reports["fibonacci_logistic"]
    assert rep.cond2["gaps"][0]["gap"] <= 1e-3
    assert rep.cond1["D"] > 4
    assert rep.cond3["growth"] and rep.cond4["growth"]
    assert rep.entropy["s_hat"] == pytest.approx(1.72921193, abs=1e-6)
    assert not rep.mme["conformal_is_invariant"]


def test_report_schema(reports):
    d = reports["logistic4"].to_dict()
    for key in ("map", "entropy", "cond1", "cond2", "cond3", "cond4", "consistent", "budgets", "schema_version"):
        assert key in d
    for k in (1, 2, 3, 4):
        assert isinstance(d[f"cond{k}"]["verdict"], bool)
    assert d["budgets"] == Budgets().to_dict()
    json.loads(reports["logistic4"].to_json())


def test_deterministic(corpus, reports):
    again = classify(corpus["logistic4"])
    assert again.to_json() == reports["logistic4"].to_json()


def test_recurrence_gap_examples(logistic, tent):
    assert recurrence_gap(logistic, 0.5, 1000) == 0.5
    assert recurrence_gap(tent, 0.5, 1000) == 0.5
    assert recurrence_gap(tent, tent.critical_points[0], 1000) == 0.5
    with pytest.raises(ValueError):
        recurrence_gap(tent, 0.5, 10**6 + 1)


def test_fibonacci_gap_shrinks(fibonacci):
    c = fibonacci.critical_points[0]
    gaps = [recurrence_gap(fibonacci, c, n) for n in (10, 20, 40, 10**4)]
    assert gaps[0] > 1e-2 > gaps[1] > 1e-3 > gaps[2] > gaps[3]
    # record returns at Fibonacci times, in core coordinates
    rec = closest_returns(fibonacci, c, 10**4)
    assert [n for n, _ in rec] == [1, 2, 3, 5, 8, 13, 21, 34, 55, 89, 144]
    assert rec[5][1] == pytest.approx(5.1e-3, rel=0.02) and rec[6][1] == pytest.approx(8.9e-4, rel=0.02)


@given(st.floats(3.6, 4.0), st.integers(1, 400), st.integers(1, 400))
def test_gap_monotone_in_budget(a, n1, n2):
    # more iterations can only lower the gap: a false verdict never turns true
    f = MultimodalMap.logistic(a)
    c = f.critical_points[0]
    lo, hi = sorted((n1, n2))
    assert recurrence_gap(f, c, hi) <= recurrence_gap(f, c, lo)


def test_false_verdicts_stay_false_on_denser_scans(fibonacci):
    b = Budgets()
    base = classify(fibonacci, b)
    dense = classify(fibonacci, dataclasses.replace(b, x_grid=2**11, scan_grid=2**11, recurrence_n_max=2 * 10**4))
    for i in range(4):
        if not base.verdicts[i]:
            assert not dense.verdicts[i]
    assert dense.cond3["C_star"] >= base.cond3["C_star"] * (1 - 1e-12)
    assert dense.cond4["K"] >= base.cond4["K"] * (1 - 1e-12)
    assert dense.cond1["D"] >= base.cond1["D"]


def test_cross_validate_grid_advice(logistic):
    rep = classify(logistic, dataclasses.replace(Budgets(), grid_n=2**6, exact_cdf=False))
    assert rep.verdicts == [True, True, True, False]
    assert not rep.consistent
    assert "cond3=true but cond4=false: raise grid N" in cross_validate(rep)


def test_cross_validate_recurrence_advice(logistic):
    rep = classify(logistic, dataclasses.replace(Budgets(), gap_threshold=0.6))
    assert rep.cond1["verdict"] and not rep.cond2["verdict"]
    assert "cond1=true but cond2=false: raise n_max for recurrence" in cross_validate(rep)


def test_cross_validate_on_dicts():
    d = {f"cond{i}": {"verdict": True} for i in (1, 2, 3, 4)}
    assert cross_validate(d) == []
    d["cond2"]["verdict"] = False
    assert any(s.startswith("cond1=true but cond2=false") for s in cross_validate(d))


@pytest.mark.parametrize("a", [3.3, 3.83])
def test_screen_failure(a):
    with pytest.raises(ScreenFailure):
        classify(MultimodalMap.logistic(a))


def test_corpus_loading():
    names = [e["name"] for e in load_corpus()]
    assert names == ["tent2", "logistic4", "slope3", "fibonacci_logistic"]
    f = corpus_map("fibonacci_logistic")
    # the core [f^2(c), f(c)] is rescaled onto [0, 1]
    c = f.critical_points[0].location
    assert f.evaluate(np.array([c]))[0] == pytest.approx(1.0, abs=1e-12)
    assert f.evaluate(np.array([1.0]))[0] == pytest.approx(0.0, abs=1e-12)
    assert f.params == (FIB_A,)
    with pytest.raises(KeyError):
        corpus_map("nope")
