import sys
from pathlib import Path

import numpy as np
import pytest

"""
Ensure project imports work in tests without setting PYTHONPATH.

Pytest auto-discovers conftest.py and executes it before collecting tests,
so this path tweak applies to all tests under this directory.
"""

THIS_DIR = Path(__file__).resolve().parent
REPO_ROOT = THIS_DIR.parent

if str(REPO_ROOT) not in sys.path:
    sys.path.insert(0, str(REPO_ROOT))


def pytest_configure(config):
    config.addinivalue_line("markers", "slow: Monte Carlo or timing-sensitive tests")
    config.addinivalue_line("markers", "integration: end-to-end tests across several modules")
    config.addinivalue_line("markers", "unit: single-function tests")


@pytest.fixture
def rng():
    """Fresh seeded generator per test."""
    return np.random.default_rng(1234)


@pytest.fixture
def desk_config():
    from dmimo.configs import get_preset
    return get_preset("desk")


@pytest.fixture
def desk_block(desk_config):
    """One desk-preset channel, payload and transmitted block."""
    from dmimo.channel import draw_channel, random_payload, transmit

    gen = np.random.default_rng(7)
    chan = draw_channel(desk_config, gen)
    payload = random_payload(desk_config, gen)
    block = transmit(desk_config, chan, payload, gen)
    return chan, block
