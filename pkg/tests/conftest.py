import os

import pytest
from hypothesis import HealthCheck, settings

from intervalqs.classify import corpus_maps
from intervalqs.maps import MultimodalMap

settings.register_profile("default", deadline=None, max_examples=40,
                          suppress_health_check=[HealthCheck.too_slow])
settings.register_profile("thorough", deadline=None, max_examples=400,
                          suppress_health_check=[HealthCheck.too_slow])
settings.load_profile(os.environ.get("HYPOTHESIS_PROFILE", "default"))

FIB_A = 3.9124069991432481


@pytest.fixture(scope="session")
def tent():
    return MultimodalMap.tent(2.0)


@pytest.fixture(scope="session")
def logistic():
    return MultimodalMap.logistic(4.0)


@pytest.fixture(scope="session")
def slope3():
    return MultimodalMap.piecewise_affine([1 / 3, 2 / 3], [3.0, -3.0, 3.0])


@pytest.fixture(scope="session")
def fibonacci():
    return MultimodalMap.logistic(FIB_A)


@pytest.fixture(scope="session")
def corpus():
    return corpus_maps()


@pytest.fixture(scope="session")
def mme_runs(corpus):
    """name -> (conformal run, invariant grid mu, conformal grid nu) at default budgets."""
    from intervalqs.classify import Budgets, measures

    return {name: measures(f, Budgets()) for name, f in corpus.items()}


def pytest_terminal_summary(terminalreporter):
    from . import test_acceptance

    if test_acceptance.RESULTS:
        terminalreporter.section("acceptance criteria")
        for k in sorted(test_acceptance.RESULTS):
            terminalreporter.write_line(test_acceptance.RESULTS[k])
