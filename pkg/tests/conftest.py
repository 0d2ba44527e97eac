import pytest

from metercast import trees

#: nodeid -> acceptance criterion name, filled during collection.
_ACCEPTANCE_ITEMS = {}


@pytest.fixture(scope="session", autouse=True)
def _warm_kernels():
    # compile the numba kernels once so per-test timing is meaningful
    trees.warm_up()


def pytest_collection_modifyitems(items):
    for item in items:
        marker = item.get_closest_marker("acceptance")
        if marker is not None and marker.args:
            _ACCEPTANCE_ITEMS[item.nodeid] = str(marker.args[0])


def pytest_terminal_summary(terminalreporter):
    if not _ACCEPTANCE_ITEMS:
        return
    outcomes = {}
    for status in ("passed", "failed", "error", "skipped"):
        for report in terminalreporter.stats.get(status, []):
            name = _ACCEPTANCE_ITEMS.get(getattr(report, "nodeid", None))
            if name is None:
                continue
            prior = outcomes.get(name)
            if prior is None or status != "passed":
                outcomes[name] = status
    if not outcomes:
        return
    terminalreporter.write_sep("-", "acceptance criteria")
    for name in sorted(outcomes, key=_criterion_sort_key):
        status = outcomes[name]
        verdict = "PASS" if status == "passed" else status.upper()
        terminalreporter.write_line(f"{name}: {verdict}")


def _criterion_sort_key(name):
    tail = name.rsplit("-", 1)[-1]
    return (0, int(tail)) if tail.isdigit() else (1, name)
