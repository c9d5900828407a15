"""Shared fixtures."""

import numpy as np
import pytest
import structlog

from minksym.config import Settings, get_settings
from minksym.geometry import StarBody2D, gen_random_star
from minksym.log import configure_logging

SMALL_M = 72
SMALL_G = 128


@pytest.fixture(autouse=True)
def _quiet_logging():
    configure_logging(Settings(LOG_LEVEL="WARNING"))
    yield
    structlog.reset_defaults()


@pytest.fixture(autouse=True)
def _fresh_settings():
    get_settings.cache_clear()
    yield
    get_settings.cache_clear()


@pytest.fixture
def m() -> int:
    return SMALL_M


@pytest.fixture
def G() -> int:
    return SMALL_G


@pytest.fixture
def rng() -> np.random.Generator:
    return np.random.default_rng(12345)


@pytest.fixture
def smooth_star() -> StarBody2D:
    return gen_random_star(7, SMALL_M)


@pytest.fixture
def star_pair() -> tuple[StarBody2D, StarBody2D]:
    return gen_random_star(1, SMALL_M), gen_random_star(2, SMALL_M, bounds=(0.3, 0.6))
