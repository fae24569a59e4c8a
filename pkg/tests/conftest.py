import pytest

CRITERIA = {
    1: "Table 1 reproduction, solid S-S beam",
    2: "Table 2 reproduction",
    3: "Table 3 reproduction",
    4: "constrained-expression boundary exactness",
    5: "linearity certificate",
    6: "DFL-TFC loss on the loss-study configurations",
    7: "PINN baseline properties",
    8: "least squares at least 10x faster than PINN training",
    9: "deflection trends",
    10: "finite-difference oracle convergence and agreement",
}
_RESULTS = pytest.StashKey[dict]()


def pytest_configure(config):
    config.addinivalue_line("markers", "criterion(n): test belongs to acceptance criterion n")
    config.stash[_RESULTS] = {}


@pytest.hookimpl(hookwrapper=True)
def pytest_runtest_makereport(item, call):
    outcome = yield
    rep = outcome.get_result()
    marker = item.get_closest_marker("criterion")
    if marker is None:
        return
    # a failed setup or teardown counts against the criterion too
    if rep.when == "call" or rep.failed:
        item.config.stash[_RESULTS].setdefault(marker.args[0], []).append(rep.passed)


def pytest_terminal_summary(terminalreporter, exitstatus, config):
    results = config.stash[_RESULTS]
    if not results:
        return
    terminalreporter.write_sep("=", "acceptance criteria")
    for n, title in CRITERIA.items():
        runs = results.get(n)
        status = "NOT RUN" if not runs else ("PASS" if all(runs) else "FAIL")
        terminalreporter.write_line(f"criterion {n:2d}: {status:7s} {title}")
