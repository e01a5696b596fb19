import pytest

_CRITERIA = []


@pytest.fixture
def criterion():
    """Records one pass/fail line per acceptance criterion."""
    def record(number, ok, detail):
        _CRITERIA.append((number, bool(ok), detail))
        return ok
    return record


def pytest_terminal_summary(terminalreporter):
    if not _CRITERIA:
        return
    terminalreporter.section('acceptance criteria')
    for number, ok, detail in sorted(_CRITERIA, key=lambda c: c[0]):
        terminalreporter.write_line('%s criterion %d: %s'
                                    % ('PASS' if ok else 'FAIL', number, detail))
