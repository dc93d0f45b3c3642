import sys
from pathlib import Path

import pytest

sys.path.insert(0, str(Path(__file__).parent))

_criteria = {}


def pytest_configure(config):
    config.addinivalue_line("markers", "criterion(number, title): acceptance criterion")


def pytest_runtest_logreport(report):
    marker = _markers.get(report.nodeid)
    if marker is None:
        return
    if report.when == "call" or (report.when == "setup" and not report.passed):
        outcome = "PASS" if report.passed else "SKIP" if report.skipped else "FAIL"
        _criteria.setdefault(marker, []).append(outcome)


_markers = {}


def pytest_collection_modifyitems(items):
    for item in items:
        mark = item.get_closest_marker("criterion")
        if mark is not None:
            _markers[item.nodeid] = mark.args


def pytest_terminal_summary(terminalreporter):
    if not _criteria:
        return
    terminalreporter.section("acceptance criteria")
    for (number, title), outcomes in sorted(_criteria.items()):
        outcome = next((o for o in ("FAIL", "SKIP") if o in outcomes), "PASS")
        terminalreporter.write_line(f"criterion {number:2d} {outcome}  {title}")


@pytest.fixture
def rng():
    import numpy as np

    return np.random.default_rng(12345)
