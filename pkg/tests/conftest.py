import os
from fractions import Fraction

import pytest

from freespec.moments import RankParam, solve_recursion

EPS_VALUES = [Fraction(0), Fraction(1, 4), Fraction(9, 25), Fraction(1)]

# filled by test_acceptance (criterion number -> line), echoed in the summary
ACCEPTANCE_LINES = {}


def pytest_collection_modifyitems(config, items):
    if os.environ.get("FREESPEC_MATRIX_ORACLE") == "1":
        return
    skip = pytest.mark.skip(reason="Monte Carlo runs are opt-in: set FREESPEC_MATRIX_ORACLE=1")
    for item in items:
        if "matrix" in item.keywords:
            item.add_marker(skip)
            if item.name.startswith("test_criterion_11"):
                ACCEPTANCE_LINES[11] = "[SKIP] criterion 11: matrix oracle (opt-in, set FREESPEC_MATRIX_ORACLE=1)"


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for k in sorted(ACCEPTANCE_LINES):
            terminalreporter.write_line(ACCEPTANCE_LINES[k])


_TABLES = {}


def table_for(eps, n_max=12):
    """Exact moment tables are shared between test modules."""
    key = Fraction(eps)
    if key not in _TABLES:
        _TABLES[key] = solve_recursion(RankParam.from_eps(key), 12)
    return _TABLES[key]


@pytest.fixture(params=EPS_VALUES, ids=lambda e: f"eps={e}")
def eps(request):
    return request.param
