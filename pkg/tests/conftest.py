"""
Shared fixtures and the hypothesis profile for the test suite.
"""

import os

import pytest
from hypothesis import HealthCheck, settings

from hahnlab.coefficients import FieldSpec
from hahnlab.exponents import BasisContext

# Fixed seed and no deadline: series draws are lazy and their cost varies
settings.register_profile(
    "hahnlab",
    derandomize=True,
    deadline=None,
    max_examples=200,
    suppress_health_check=[HealthCheck.too_slow],
)
settings.load_profile(os.environ.get("HYPOTHESIS_PROFILE", "hahnlab"))


@pytest.fixture
def ctx():
    return BasisContext(3)


@pytest.fixture
def f3():
    return FieldSpec(3, 1)


@pytest.fixture
def f9():
    return FieldSpec(3, 2)


@pytest.fixture
def config_path(tmp_path, monkeypatch):
    """Point the user config file at a temporary location."""
    path = tmp_path / ".hahnlab" / "config"
    monkeypatch.setattr("hahnlab.config.CONFIG_PATH", str(path))
    return path
