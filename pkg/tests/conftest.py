import functools

import pytest
from hypothesis import HealthCheck, settings

from twistlab.families import make_family

settings.register_profile(
    "twistlab", deadline=None, max_examples=40, suppress_health_check=[HealthCheck.too_slow]
)
settings.load_profile("twistlab")


@functools.lru_cache(maxsize=None)
def family(kind, **params):
    return make_family(kind, **params)


@pytest.fixture(scope="session")
def billiard_spec():
    return family("billiard", a=2.0, b=1.0)


@pytest.fixture(scope="session")
def circle_table():
    return family("billiard", a=1.0, b=1.0)


def pytest_terminal_summary(terminalreporter):
    mod = __import__("sys").modules.get("test_acceptance")
    results = getattr(mod, "RESULTS", None)
    if results:
        terminalreporter.section("acceptance criteria")
        for k in sorted(results):
            terminalreporter.write_line(results[k])
