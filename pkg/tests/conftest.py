"""
Pytest configuration and shared fixtures for all test subdirectories.

Unit tests (``tests/unit_tests/``) run small networks with fixed seeds.
Statistical tests that need long horizons are marked ``slow``; deselect
them with ``pytest -m "not slow"``.

Shared constants and spec factories live in :mod:`tests.utils`.
"""

import json

import pytest

# Better assertion messages if custom assert helpers are added to tests.utils.
pytest.register_assert_rewrite("tests.utils")

from tests.utils import TEST_SEED, complete_spec, scenario_doc


@pytest.fixture()
def seed():
    return TEST_SEED


@pytest.fixture()
def small_spec():
    """Fully connected 6-node ASUMAN network with default rates."""
    return complete_spec(6)


@pytest.fixture()
def write_scenario(tmp_path):
    """Write a scenario document to a temp file and return its path."""

    def _write(document=None, name="scenario.json", **overrides):
        path = tmp_path / name
        path.write_text(json.dumps(document if document is not None else scenario_doc(**overrides)))
        return path

    return _write


@pytest.fixture(autouse=True)
def _quiet_env(monkeypatch):
    """Keep host ASUMAN_SIM_* settings and OTLP export out of the tests."""
    for var in (
        "ASUMAN_SIM_JOBS",
        "ASUMAN_SIM_LOG_LEVEL",
        "ASUMAN_SIM_WARMUP_FRACTION",
        "ASUMAN_SIM_ENABLE_TELEMETRY",
    ):
        monkeypatch.delenv(var, raising=False)
    monkeypatch.setenv("ASUMAN_SIM_PROGRESS", "false")
