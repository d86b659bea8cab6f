import numpy as np
import pytest

import ewb

# One pass/fail line per acceptance criterion, re-emitted after the test
# summary so they are visible without -s.
ACCEPTANCE_LINES = []


def record_acceptance(line: str) -> None:
    ACCEPTANCE_LINES.append(line)


def pytest_terminal_summary(terminalreporter, exitstatus, config):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)


@pytest.fixture
def mercedes_benz() -> ewb.Frame:
    """Three planar unit vectors at 90, 210 and 330 degrees (the smallest
    real ETF: m=2, n=3, all off-diagonal correlations -1/2)."""
    ang = np.deg2rad([90.0, 210.0, 330.0])
    return ewb.Frame(field="real", entries=np.vstack([np.cos(ang), np.sin(ang)]))
