import os
import tempfile

import pytest

# keep orbit-ball caches out of the user's home directory during tests
os.environ.setdefault("RANKONE_CACHE_DIR", os.path.join(tempfile.gettempdir(), "rankone-test-cache"))

_CRITERIA = {}


def pytest_configure(config):
    config.addinivalue_line("markers", "criterion(number, title): acceptance criterion")


@pytest.hookimpl(hookwrapper=True)
def pytest_runtest_makereport(item, call):
    outcome = yield
    rep = outcome.get_result()
    mark = item.get_closest_marker("criterion")
    if mark is None:
        return
    num, title = mark.args
    if rep.when == "call" or (rep.when == "setup" and rep.outcome != "passed"):
        if hasattr(rep, "wasxfail"):
            state = "FAIL (expected, see decisions ledger)"
        else:
            state = "PASS" if rep.passed else "FAIL"
        detail = getattr(item, "criterion_detail", "")
        _CRITERIA[num] = (title, state, detail)


def pytest_terminal_summary(terminalreporter):
    if not _CRITERIA:
        return
    terminalreporter.section("acceptance criteria")
    for num in sorted(_CRITERIA):
        title, state, detail = _CRITERIA[num]
        line = f"criterion {num:2d} {title}: {state}"
        if detail:
            line += f"  [{detail}]"
        terminalreporter.write_line(line)
