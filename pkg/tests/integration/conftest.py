from __future__ import annotations

from pathlib import Path

import pytest
from click.testing import CliRunner

from app import create_app
from tests.conftest import SCENARIO_DIR


@pytest.fixture
def app_instance(tmp_path: Path):
    """Create a fresh Flask app + SQLite archive per test.

    WHY:
    - Isolation: each test gets its own DB file.
    - Scenario paths in requests resolve against the shipped scenarios.
    """
    db_path = tmp_path / "test_carnot_lab.db"
    app = create_app(
        {
            "TESTING": True,
            "DATABASE": str(db_path),
            "CARNOT_LAB_SCENARIO_DIR": str(SCENARIO_DIR),
            "LOG_LEVEL": "WARNING",
        }
    )
    yield app


@pytest.fixture
def client(app_instance):
    return app_instance.test_client()


@pytest.fixture
def cli_runner(monkeypatch, tmp_path: Path) -> CliRunner:
    """Click runner with the output directory and archive redirected to tmp_path."""
    monkeypatch.setenv("CARNOT_LAB_OUTPUT_DIR", str(tmp_path / "output"))
    monkeypatch.setenv("DATABASE", str(tmp_path / "cli_archive.db"))
    monkeypatch.setenv("LOG_LEVEL", "WARNING")
    return CliRunner()
