import random

import pytest
from hypothesis import HealthCheck, settings

from deforma.linalg import Field

settings.register_profile("deforma", deadline=None, derandomize=True, max_examples=40,
                          suppress_health_check=[HealthCheck.too_slow, HealthCheck.data_too_large])
settings.load_profile("deforma")


@pytest.fixture
def Q():
    return Field(None)


@pytest.fixture
def Fp():
    return Field()


@pytest.fixture
def rng():
    return random.Random(12345)


# -- acceptance summary -----------------------------------------------------------
# Tests marked ``criterion(n, title)`` are grouped by ``n``; a criterion passes
# when all of its tests pass.  One line per criterion is printed at the end.

_CRITERIA: dict = {}


def pytest_configure(config):
    config.addinivalue_line("markers", "criterion(n, title): acceptance criterion n")


@pytest.hookimpl(hookwrapper=True)
def pytest_runtest_makereport(item, call):
    outcome = yield
    rep = outcome.get_result()
    mark = item.get_closest_marker("criterion")
    if mark is None or (rep.when != "call" and not rep.failed):
        return
    n, title = mark.args
    entry = _CRITERIA.setdefault(n, {"title": title, "ok": True, "failed": []})
    if rep.failed or rep.skipped:
        entry["ok"] = False
        entry["failed"].append(item.name)


def pytest_terminal_summary(terminalreporter):
    if not _CRITERIA:
        return
    terminalreporter.section("acceptance criteria")
    for n in sorted(_CRITERIA):
        e = _CRITERIA[n]
        line = f"criterion {n:2d}: {'PASS' if e['ok'] else 'FAIL'}  {e['title']}"
        if e["failed"]:
            line += f"  (failing: {', '.join(e['failed'])})"
        terminalreporter.write_line(line)
