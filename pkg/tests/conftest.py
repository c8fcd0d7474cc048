import pytest

from storesize.model import SystemModel


@pytest.fixture
def two_user():
    """N=2, chi=1, C=1.5: a single negative eigenvalue -8/3, solvable by hand."""
    return SystemModel.from_params(2, 1.0, 1.5)


@pytest.fixture
def one_user():
    return SystemModel.from_params(1, 0.5, 0.8)


_ACCEPTANCE: list[tuple[str, bool, str]] = []


@pytest.fixture
def acceptance():
    """Record one criterion outcome; the line is echoed in the terminal summary."""

    def record(label: str, ok: bool, detail: str = "") -> bool:
        line = f"{'PASS' if ok else 'FAIL'} {label}" + (f": {detail}" if detail else "")
        _ACCEPTANCE.append((label, ok, line))
        print(line)
        return ok

    return record


def pytest_terminal_summary(terminalreporter):
    if _ACCEPTANCE:
        terminalreporter.section("acceptance criteria")
        for _, _, line in _ACCEPTANCE:
            terminalreporter.write_line(line)
