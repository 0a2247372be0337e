import functools
import os

import pytest
from hypothesis import HealthCheck, settings

from thetagrid import GridSpec
from thetagrid.oracle import all_resistances_from

settings.register_profile("default", max_examples=60, deadline=None,
                          suppress_health_check=[HealthCheck.too_slow])
settings.register_profile("thorough", max_examples=500, deadline=None)
settings.load_profile(os.environ.get("HYPOTHESIS_PROFILE", "default"))


@functools.lru_cache(maxsize=None)
def oracle_map(lx, ly, alpha, source):
    """Oracle resistances from ``source``, shared across test modules."""
    return all_resistances_from(source, GridSpec.from_alpha(lx, ly, alpha))


@pytest.fixture
def oracle():
    return oracle_map


#: One line per acceptance criterion, filled in by test_acceptance.py.
ACCEPTANCE_LINES = []


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)
