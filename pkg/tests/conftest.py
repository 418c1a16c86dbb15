import pytest

from geomgamma import suites


@pytest.fixture(scope="session")
def quad():
    return suites.ray_class_input(suites.load_bundled("quad"))


@pytest.fixture(scope="session")
def cubic1():
    return suites.ray_class_input(suites.load_bundled("cubic1"))


@pytest.fixture(scope="session")
def cubic2():
    return suites.ray_class_input(suites.load_bundled("cubic2"))


def pytest_terminal_summary(terminalreporter):
    import sys

    mod = sys.modules.get("test_acceptance") or sys.modules.get("tests.test_acceptance")
    results = getattr(mod, "RESULTS", None)
    if not results:
        return
    terminalreporter.section("acceptance criteria")
    for k in sorted(results):
        terminalreporter.write_line(results[k])
    missing = [k for k in range(1, 14) if k not in results]
    if missing:
        terminalreporter.write_line(f"not run: {missing}")
