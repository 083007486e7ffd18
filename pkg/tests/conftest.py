import pytest

from barrier_hosm import HongParams, make_profile

# filled by the ``criterion`` fixture, printed at session end
ACCEPTANCE = []


@pytest.fixture
def hong3():
    """The r = 3, kappa = -1/3, l = (1, 2, 5) controller used throughout."""
    return HongParams(make_profile(3, -1 / 3), (1.0, 2.0, 5.0))


@pytest.fixture
def criterion(request):
    """Record ``(label, passed, detail)`` for the acceptance summary."""
    entry = {"label": request.node.name, "detail": ""}

    def note(label, detail=""):
        entry["label"] = label
        entry["detail"] = detail

    yield note
    rep = getattr(request.node, "rep_call", None)
    passed = rep is not None and rep.passed
    ACCEPTANCE.append((entry["label"], passed, entry["detail"]))


@pytest.hookimpl(hookwrapper=True)
def pytest_runtest_makereport(item, call):
    outcome = yield
    rep = outcome.get_result()
    if rep.when == "call":
        item.rep_call = rep


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE:
        return
    terminalreporter.section("acceptance criteria")
    for label, passed, detail in ACCEPTANCE:
        line = f"{'PASS' if passed else 'FAIL'}  {label}"
        if detail:
            line += f"  ({detail})"
        terminalreporter.write_line(line)
