import sys
from pathlib import Path

import numpy as np
import pytest

sys.path.insert(0, str(Path(__file__).parent))

from essns.landscape import FireMap, GridSpec  # noqa: E402

_acceptance = {}


@pytest.fixture
def rng():
    return np.random.default_rng(12345)


@pytest.fixture
def grid16():
    return GridSpec(16, 16, 30.0)


@pytest.fixture
def center_fire16(grid16):
    return FireMap.from_cells(grid16, [(8, 8)])


def pytest_runtest_makereport(item, call):
    marker = item.get_closest_marker("acceptance")
    if marker is None or call.when not in ("setup", "call"):
        return
    number, title = marker.args
    if call.when == "setup" and call.excinfo is None:
        return
    passed = call.excinfo is None
    if call.excinfo is not None and call.excinfo.errisinstance(pytest.skip.Exception):
        status = "SKIP"
    else:
        status = "PASS" if passed else "FAIL"
    _acceptance[number] = (title, status)


def pytest_terminal_summary(terminalreporter):
    if not _acceptance:
        return
    terminalreporter.section("acceptance criteria")
    for number in sorted(_acceptance):
        title, status = _acceptance[number]
        terminalreporter.write_line(f"[{status}] criterion {number}: {title}")
