import random

import pytest

from unitdist.config import config as settings
from unitdist.independence import Registry, load_registry


def pytest_configure(config):
    config.addinivalue_line("markers", "slow: long acceptance runs, deselect with -m 'not slow'")


@pytest.fixture()
def rng():
    """Seeded from the `seed` config key so property tests are repeatable."""
    return random.Random(settings["seed"].get(int))


@pytest.fixture(scope="session")
def registry() -> Registry:
    return load_registry()


@pytest.fixture()
def registry_file(tmp_path):
    path = tmp_path / "bounds.registry"
    path.write_text(
        "# test registry\n"
        "johnson:13,6,2   upper  150  loose\n"
        "johnson:13,6,2   upper  148  tight\n"
        "orth:24          upper  183373  sdp\n"
    )
    return path
