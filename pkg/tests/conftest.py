import pytest

from fwlab import bump_profile, make_grid

ACCEPTANCE_LINES: list = []


@pytest.fixture(scope="session")
def grid64():
    return make_grid(4096, 64)


@pytest.fixture(scope="session")
def psi64(grid64):
    return bump_profile(grid64).psi


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)
