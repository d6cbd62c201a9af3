import pytest

from edgegensim.config import default_categories, default_config, default_profiles


@pytest.fixture(scope="session")
def profiles():
    return default_profiles()


@pytest.fixture(scope="session")
def categories():
    return default_categories()


@pytest.fixture(scope="session")
def config():
    return default_config()
