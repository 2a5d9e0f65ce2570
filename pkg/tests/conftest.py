import numpy as np
import pytest

from fapnfd.model import plan_from_count
from fapnfd.nfd import SeparationMatrix

_ACCEPTANCE = {}


@pytest.hookimpl(hookwrapper=True)
def pytest_runtest_makereport(item, call):
    """Collect a one-line verdict for every test marked ``acceptance``."""
    outcome = yield
    rep = outcome.get_result()
    mark = item.get_closest_marker("acceptance")
    if mark is None or not (rep.when == "call" or rep.skipped):
        return
    number, title = mark.args
    verdict = "SKIP" if rep.skipped else ("PASS" if rep.passed else "FAIL")
    detail = dict(item.user_properties).get("detail", "")
    line = f"ACCEPTANCE {number:>2} {verdict}  {title}"
    if detail:
        line += f"  [{detail}]"
    _ACCEPTANCE[number] = line


def pytest_terminal_summary(terminalreporter):
    if _ACCEPTANCE:
        terminalreporter.section("acceptance criteria")
        for k in sorted(_ACCEPTANCE):
            terminalreporter.write_line(_ACCEPTANCE[k])


@pytest.fixture
def uniform_sep():
    """Factory: ``n`` links with the same separation on every pair."""
    def make(n, s):
        q = np.full((n, n), s, dtype=np.int64)
        np.fill_diagonal(q, 0)
        return SeparationMatrix(tuple(range(1, n + 1)), q)
    return make


@pytest.fixture
def small_plan():
    return plan_from_count(50)
