import numpy as np
import pytest

from hodgeheight.biextension import build_biextension, random_spec
from hodgeheight.scenarios import cubic_orbit, dilog_fiber


@pytest.fixture
def rng():
    return np.random.default_rng(20240811)


@pytest.fixture
def dilog_at_2i():
    return dilog_fiber(0.4 + 0.65j)


@pytest.fixture
def cubic():
    return cubic_orbit()


def random_oriented(rng, **kw):
    return build_biextension(random_spec(rng, **kw))
