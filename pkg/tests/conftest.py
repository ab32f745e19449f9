"""
Shared fixtures for unit and BDD tests.

- fresh_bus: empties the process-wide EventBus before and after a test that subscribes to it
"""

import pytest

from src.bus.events import bus


@pytest.fixture
def fresh_bus():
    bus.clear()
    yield bus
    bus.clear()
