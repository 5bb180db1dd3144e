import pytest

from noma_aoi import FixedProb, SystemParams, design_ii_levels


@pytest.fixture
def two_user_game():
    """M=2, K=2, attempt probability 1/2, every level affordable."""
    params = SystemParams(2, 2, slots_per_frame=2, slot_duration=1.0,
                          power_budget=1e300, tx_policy=FixedProb(0.5))
    return params, design_ii_levels(1.0, 2)


ACCEPTANCE_LINES = []


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)
