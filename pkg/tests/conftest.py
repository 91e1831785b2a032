import numpy as np
import pytest

from hyperdcqd.channels import build_channel, channel_zoo


@pytest.fixture(scope="session")
def zoo():
    """name -> (spec, chi, kraus) for the six comparison processes."""
    return {name: (spec, *build_channel(spec)) for name, spec in channel_zoo().items()}


@pytest.fixture
def rng():
    return np.random.default_rng(20240611)
