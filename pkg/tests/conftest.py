import pytest

from iontransport.core import equilibrium, fig1_params


@pytest.fixture(scope="session")
def p1():
    return fig1_params()


@pytest.fixture(scope="session")
def eq1(p1):
    return equilibrium(p1)


# acceptance lines are collected here and echoed in the terminal summary
ACCEPTANCE: dict = {}


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE:
        return
    terminalreporter.section("acceptance criteria")
    for key in sorted(ACCEPTANCE, key=lambda k: int(k)):
        terminalreporter.write_line(ACCEPTANCE[key])
