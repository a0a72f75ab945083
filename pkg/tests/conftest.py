import pytest

_ACCEPTANCE = []


class _Recorder:
    def __init__(self, nodeid):
        self.nodeid = nodeid

    def check(self, label, passed, detail=""):
        _ACCEPTANCE.append((label, bool(passed), detail))
        assert passed, f"{label}: {detail}"


@pytest.fixture
def criterion(request):
    return _Recorder(request.node.nodeid)


def pytest_terminal_summary(terminalreporter):
    if not _ACCEPTANCE:
        return
    terminalreporter.section("acceptance criteria")
    for label, passed, detail in _ACCEPTANCE:
        terminalreporter.write_line(f"{'PASS' if passed else 'FAIL'}  {label}  {detail}")
