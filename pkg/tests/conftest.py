import sys
from pathlib import Path

import numpy as np
import pytest

sys.path.insert(0, str(Path(__file__).parent))

from tssort.graphs import SummaryGraph  # noqa: E402

A, B, C, D = range(4)


@pytest.fixture
def cycle_graph():
    """A -> B, B <-> C, D -> C."""
    return SummaryGraph.from_edges(4, [(A, B), (B, C), (C, B), (D, C)])


@pytest.fixture
def cycle_criterion():
    return np.array([1.0, 2.0, 3.0, 2.5])


def pytest_terminal_summary(terminalreporter):
    mod = sys.modules.get("test_acceptance")
    lines = getattr(mod, "RESULTS", None)
    if lines:
        terminalreporter.section("acceptance criteria")
        for line in sorted(lines, key=lambda s: int(s.split()[2].rstrip(":"))):
            terminalreporter.write_line(line)
