"""Shared test configuration.

Registers a hypothesis profile without deadlines (numeric property tests
may hit slow first-call paths under coverage or cold caches) and exposes a
session-scoped directory of scenario outputs so multiple test modules can
inspect the same artifacts without re-running the scenarios.
"""

from __future__ import annotations

import pytest
from hypothesis import HealthCheck, settings

settings.register_profile(
    "snvsim",
    deadline=None,
    suppress_health_check=[HealthCheck.too_slow],
)
settings.load_profile("snvsim")


@pytest.fixture(scope="session")
def scenario_output_root(tmp_path_factory):
    """One shared output root for scenario runs that only need reading back."""
    return tmp_path_factory.mktemp("scenario_runs")
