import pytest
from hypothesis import settings

from sdocheck.vocab import load_default_vocabulary

settings.register_profile("suite", deadline=None)
settings.load_profile("suite")


@pytest.fixture(scope="session")
def vocab():
    return load_default_vocabulary()
