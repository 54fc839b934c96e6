import sys
import warnings
from pathlib import Path

import numpy as np
import pytest
from hypothesis import settings

sys.path.insert(0, str(Path(__file__).parent))

from twoqubit_ness.errors import MarkovianValidityWarning  # noqa: E402

settings.register_profile("default", max_examples=60, deadline=None)
settings.load_profile("default")

_CRITERIA: dict[int, dict] = {}


@pytest.fixture(autouse=True)
def _quiet_markov():
    # the advisory warning fires at the reference parameters; tests that need it catch it explicitly
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", MarkovianValidityWarning)
        yield


@pytest.fixture
def rng():
    return np.random.default_rng(20240611)


def pytest_runtest_logreport(report):
    if report.when != "call" and not (report.when == "setup" and report.outcome != "passed"):
        return
    marker = dict(report.user_properties).get("criterion")
    if marker is None:
        return
    number, title = marker
    entry = _CRITERIA.setdefault(number, {"title": title, "passed": True, "failed": []})
    if report.outcome != "passed":
        entry["passed"] = False
        entry["failed"].append(report.nodeid.split("::")[-1])


def pytest_collection_modifyitems(items):
    for item in items:
        m = item.get_closest_marker("criterion")
        if m is not None:
            item.user_properties.append(("criterion", (m.args[0], m.args[1])))


def pytest_terminal_summary(terminalreporter):
    if not _CRITERIA:
        return
    terminalreporter.section("acceptance criteria")
    for number in sorted(_CRITERIA):
        entry = _CRITERIA[number]
        status = "PASS" if entry["passed"] else "FAIL"
        line = f"{status}  criterion {number:2d}: {entry['title']}"
        if entry["failed"]:
            line += f"  [failed: {', '.join(entry['failed'])}]"
        terminalreporter.write_line(line)
