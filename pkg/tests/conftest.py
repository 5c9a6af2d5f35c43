import warnings

import pytest

from gbsclique.gbs import CollisionRegimeWarning

# (criterion number, title) -> (passed, detail); filled by the acceptance tests
ACCEPTANCE: dict = {}


@pytest.fixture
def record():
    def _record(num: int, title: str, passed: bool, detail: str = ""):
        ACCEPTANCE[(num, title)] = (bool(passed), detail)
        return bool(passed)
    return _record


@pytest.fixture(autouse=True)
def _quiet_collision_warning():
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", CollisionRegimeWarning)
        yield


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE:
        return
    tr = terminalreporter
    tr.section("acceptance criteria")
    for (num, title), (ok, detail) in sorted(ACCEPTANCE.items()):
        tr.write_line(f"{'PASS' if ok else 'FAIL'}  criterion {num:2d}  {title}: {detail}")
