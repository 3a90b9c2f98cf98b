import pytest

from thzcap.capacity import Impairments, PowerBudget, Scenario
from thzcap.fading import AlphaMuParams, MisalignmentGeometry
from thzcap.linkbudget import LinkGeometry


@pytest.fixture
def fig1():
    """Reference link: 275 GHz, 30 m, 55 dBi, P/N0 = 25 dB, mu = 4."""
    return Scenario(
        geometry=LinkGeometry(275e9, 30.0, 55.0, 55.0),
        misalignment=MisalignmentGeometry(0.1, 0.2, 0.04),
        budget=PowerBudget(25.0),
        fading=AlphaMuParams(2.0, 4.0, 1.0),
        impairments=Impairments(0.0, 0.0),
    )


@pytest.fixture
def fig2():
    return Scenario(
        geometry=LinkGeometry(300e9, 20.0, 55.0, 55.0),
        misalignment=MisalignmentGeometry(0.1, 0.2, 0.01),
        budget=PowerBudget(20.0),
        fading=AlphaMuParams(2.0, 4.0, 1.0),
    )


def pytest_terminal_summary(terminalreporter):
    import sys

    mod = sys.modules.get("test_acceptance") or sys.modules.get("tests.test_acceptance")
    verdicts = getattr(mod, "VERDICTS", None)
    if not verdicts:
        return
    terminalreporter.section("acceptance criteria")
    for n in sorted(verdicts):
        terminalreporter.write_line(verdicts[n])
