"""
Shared pytest setup: import path, the ``slow`` marker and rule fixtures.
"""
import sys
from pathlib import Path

import pytest

ROOT = Path(__file__).resolve().parent
if str(ROOT) not in sys.path:
    sys.path.insert(0, str(ROOT))

RULES_DIR = ROOT / "data" / "rules"


def pytest_addoption(parser):
    parser.addoption("--runslow", action="store_true", default=False,
                     help="run long derivation and convergence tests")


def pytest_configure(config):
    config.addinivalue_line("markers", "slow: long derivation, elimination or convergence runs")


def pytest_collection_modifyitems(config, items):
    if config.getoption("--runslow"):
        return
    skip_slow = pytest.mark.skip(reason="needs --runslow")
    for item in items:
        if "slow" in item.keywords:
            item.add_marker(skip_slow)


@pytest.fixture
def rules_dir():
    return RULES_DIR


@pytest.fixture
def rule_text():
    """Read a shipped fixture rule file by name."""
    def _read(name):
        return (RULES_DIR / name).read_text()
    return _read
