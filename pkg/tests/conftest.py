import pytest

from hidm.algebra import PairingContext, SchnorrGroup, ToyPairingContext
from hidm.randomness import RandomSource


@pytest.fixture(scope="session")
def ctx():
    return PairingContext.default()


@pytest.fixture(scope="session")
def toy_ctx():
    return ToyPairingContext()


@pytest.fixture(scope="session")
def schnorr_group():
    return SchnorrGroup.default()


@pytest.fixture()
def rng():
    return RandomSource(seed=b"hidm-test-fixture")
