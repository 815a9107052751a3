import pytest

from butson.algebra import circulant, fourier, kronecker

CIRCULANT_ROW = (0, 0, 0, 0, 1, 2, 0, 2, 1)

_criteria: dict[int, dict[str, int]] = {}


def pytest_addoption(parser):
    parser.addoption("--extended", action="store_true", default=False,
                     help="run the long searches")


def pytest_configure(config):
    config.addinivalue_line("markers", "criterion(n): acceptance criterion number")


def pytest_collection_modifyitems(config, items):
    if config.getoption("--extended"):
        return
    skip = pytest.mark.skip(reason="needs --extended")
    for item in items:
        if "extended" in item.keywords:
            item.add_marker(skip)


def pytest_runtest_logreport(report):
    crit = getattr(report, "criterion", None)
    if crit is None:
        return
    tally = _criteria.setdefault(crit, {"passed": 0, "failed": 0, "skipped": 0})
    if report.when == "call" or report.outcome != "passed":
        if report.when == "teardown" and report.outcome == "passed":
            return
        tally[report.outcome] += 1


@pytest.hookimpl(hookwrapper=True)
def pytest_runtest_makereport(item, call):
    outcome = yield
    rep = outcome.get_result()
    m = item.get_closest_marker("criterion")
    if m is not None:
        rep.criterion = m.args[0]


def pytest_terminal_summary(terminalreporter):
    if not _criteria:
        return
    terminalreporter.section("acceptance criteria")
    for crit in sorted(_criteria):
        t = _criteria[crit]
        if t["failed"]:
            status = "FAIL"
        elif t["passed"]:
            status = "PASS"
        else:
            status = "NOT RUN"
        if t["skipped"]:
            status += f" ({t['skipped']} part(s) need --extended)"
        terminalreporter.write_line(f"criterion {crit}: {status}")


@pytest.fixture
def f3():
    return fourier(3)


@pytest.fixture
def h2():
    return circulant(CIRCULANT_ROW, 3)


@pytest.fixture
def f3f3():
    return kronecker(fourier(3), fourier(3))
