import random

import pytest

from src.config import Settings, set_settings
from src.grig_core import clear_trivial_cache


@pytest.fixture(autouse=True)
def default_settings():
    """Every test starts from the built-in defaults, independent of config.yaml and the environment."""
    set_settings(Settings())
    clear_trivial_cache()
    yield
    set_settings(None)


@pytest.fixture
def rng():
    return random.Random(20240101)
