import os

import pytest
from hypothesis import HealthCheck, settings

from plumbseries.lattice import build_lattice

settings.register_profile("ci", max_examples=60, deadline=None, derandomize=True,
                          suppress_health_check=[HealthCheck.too_slow])
settings.register_profile("dev", max_examples=20, deadline=None)
settings.load_profile(os.environ.get("HYPOTHESIS_PROFILE", "ci"))


@pytest.fixture(scope="session")
def A1():
    return build_lattice("A", 1)


@pytest.fixture(scope="session")
def A2():
    return build_lattice("A", 2)


@pytest.fixture(scope="session")
def A3():
    return build_lattice("A", 3)


# -- per-criterion acceptance summary --------------------------------------------

_criteria: dict[int, list[tuple[str, str]]] = {}


def pytest_configure(config):
    config.addinivalue_line("markers", "criterion(n): acceptance criterion the test belongs to")


@pytest.hookimpl(hookwrapper=True)
def pytest_runtest_makereport(item, call):
    outcome = yield
    rep = outcome.get_result()
    mark = item.get_closest_marker("criterion")
    if mark is None:
        return
    if rep.when == "call" or (rep.when == "setup" and not rep.passed):
        if hasattr(rep, "wasxfail"):
            status = "xfail"
        elif rep.skipped:
            status = "skip"
        else:
            status = "pass" if rep.passed else "fail"
        _criteria.setdefault(mark.args[0], []).append((item.name, status))


def pytest_terminal_summary(terminalreporter):
    if not _criteria:
        return
    terminalreporter.section("acceptance criteria")
    for n in sorted(_criteria):
        results = _criteria[n]
        ok = all(s == "pass" for _, s in results)
        notes = ", ".join(f"{name}: {s}" for name, s in results if s != "pass")
        line = f"criterion {n:2d}: {'PASS' if ok else 'FAIL'}"
        terminalreporter.write_line(line + (f"  ({notes})" if notes else ""))
