import sys

import pytest

from spirkit.access import EXAMPLE_ACCESS
from spirkit.mmsp import EXAMPLE_MMSP


@pytest.fixture
def example_mmsp():
    return EXAMPLE_MMSP


@pytest.fixture
def example_access():
    return EXAMPLE_ACCESS


def pytest_terminal_summary(terminalreporter):
    module = sys.modules.get("test_acceptance")
    if module is None or not module.RESULTS:
        return
    terminalreporter.section("acceptance criteria")
    for n in sorted(module.RESULTS):
        terminalreporter.write_line(module.RESULTS[n])
