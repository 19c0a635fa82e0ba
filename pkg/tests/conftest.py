from pathlib import Path

import pytest

from chatocc.stimuli import FixtureBundle, fixtures

TESTS_DIR = Path(__file__).parent
GOLDEN_DIR = TESTS_DIR / "golden"
PACKAGE_DIR = TESTS_DIR.parent / "src" / "chatocc"


@pytest.fixture(scope="session")
def bundle() -> FixtureBundle:
    return fixtures()


@pytest.fixture()
def golden_dir() -> Path:
    return GOLDEN_DIR
