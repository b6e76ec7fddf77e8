import os
from fractions import Fraction

import pytest
from hypothesis import HealthCheck, settings

from sectobs.curve import Genus2Curve, factor_sextic, family_curve

settings.register_profile("sectobs", deadline=None, suppress_health_check=[HealthCheck.too_slow])
settings.load_profile("sectobs")

NO_Q2_POINT = (3, 0, 8, 0, 2, 0, -6)  # f6..f0


@pytest.fixture(scope="session")
def c711():
    return family_curve(7, -11)


@pytest.fixture(scope="session")
def fs711(c711):
    return factor_sextic(c711)


@pytest.fixture(scope="session")
def no_q2():
    return Genus2Curve.from_high(NO_Q2_POINT)


@pytest.fixture(autouse=True)
def _isolated_cache(tmp_path, monkeypatch):
    monkeypatch.setenv("SECTOBS_CACHE", str(tmp_path / "cache"))
    yield


def F(x):
    return Fraction(x)


# ---------------------------------------------------------------------------
# acceptance summary: one line per criterion at the end of the run

_ACCEPTANCE: dict[int, list] = {}


def pytest_configure(config):
    config.addinivalue_line("markers", "acceptance(n, title): acceptance criterion n")


def pytest_runtest_logreport(report):
    if report.when != "call" and not (report.when == "setup" and report.outcome != "passed"):
        return
    mark = _ACCEPTANCE_MARKS.get(report.nodeid)
    if mark is None:
        return
    n, title = mark
    entry = _ACCEPTANCE.setdefault(n, [title, True])
    entry[1] = entry[1] and report.outcome == "passed"


_ACCEPTANCE_MARKS: dict[str, tuple] = {}


def pytest_collection_modifyitems(items):
    for item in items:
        m = item.get_closest_marker("acceptance")
        if m is not None:
            _ACCEPTANCE_MARKS[item.nodeid] = tuple(m.args)


def pytest_terminal_summary(terminalreporter):
    if not _ACCEPTANCE:
        return
    terminalreporter.section("acceptance criteria")
    for n in sorted(_ACCEPTANCE):
        title, ok = _ACCEPTANCE[n]
        terminalreporter.write_line(f"criterion {n}: {'PASS' if ok else 'FAIL'}  {title}")
