import sys
from pathlib import Path

import numpy as np
import pytest

sys.path.insert(0, str(Path(__file__).parent))


@pytest.fixture
def rng():
    return np.random.default_rng(20240611)


def pytest_terminal_summary(terminalreporter):
    from acceptance_report import LINES

    if not LINES:
        return
    terminalreporter.section("acceptance criteria")
    for tag in sorted(LINES, key=lambda t: int(t[1:])):
        terminalreporter.write_line(LINES[tag])
