"""Collects acceptance outcomes and prints one line per criterion after the run."""
from collections import OrderedDict

import pytest

_OUTCOMES: "OrderedDict[str, list]" = OrderedDict()


def pytest_configure(config):
    config.addinivalue_line("markers", "acceptance(label): acceptance criterion exercised by the test")


def pytest_runtest_logreport(report):
    label = dict(report.user_properties).get("acceptance")
    if label is None:
        return
    if report.when == "call" or (report.when == "setup" and not report.passed):
        detail = dict(report.user_properties).get("detail", "")
        _OUTCOMES.setdefault(label, []).append((report.nodeid.split("::")[-1], report.passed, detail))


@pytest.fixture(autouse=True)
def _acceptance_label(request):
    marker = request.node.get_closest_marker("acceptance")
    if marker is not None:
        request.node.user_properties.append(("acceptance", marker.args[0]))


@pytest.fixture
def detail(request):
    """Call with a short string to attach it to the criterion's summary line."""
    def record(text):
        request.node.user_properties.append(("detail", text))
    return record


def pytest_terminal_summary(terminalreporter):
    if not _OUTCOMES:
        return
    terminalreporter.section("acceptance criteria")
    for label in sorted(_OUTCOMES, key=lambda s: int(s[1:])):
        results = _OUTCOMES[label]
        ok = all(passed for _, passed, _ in results)
        notes = "; ".join(f"{name}: {d}" if d else name for name, _, d in results)
        terminalreporter.write_line(f"{label} {'PASS' if ok else 'FAIL'}  {notes}")
