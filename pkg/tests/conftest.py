from __future__ import annotations

import sys
from pathlib import Path

import pytest

sys.path.insert(0, str(Path(__file__).parent))

from agentassist.config import load_config
from agentassist.stores import load_stores

FIXTURES = Path(__file__).parent.parent / "fixtures"


@pytest.fixture(scope="session")
def fixture_config():
    return load_config(FIXTURES / "config" / "engine.json")


@pytest.fixture()
def fixture_stores(fixture_config):
    # fresh per test: routing mutates FAQ hit counts
    return load_stores(fixture_config)


@pytest.fixture(scope="session")
def fixtures_dir() -> Path:
    return FIXTURES


@pytest.fixture(scope="session")
def travel_script(fixtures_dir) -> Path:
    return fixtures_dir / "scripts" / "travel_plan.ndjson"


@pytest.fixture(scope="session")
def hinglish_script(fixtures_dir) -> Path:
    return fixtures_dir / "scripts" / "travel_plan_hinglish.ndjson"
