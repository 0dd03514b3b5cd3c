import math

import numpy as np
import pytest

from swexp.binary_example import BinaryExample
from swexp.info_core import Channel, Distribution


@pytest.fixture(scope="session")
def bsc05():
    return Channel([[0.95, 0.05], [0.05, 0.95]])


@pytest.fixture(scope="session")
def uniform2():
    return Distribution([0.5, 0.5])


@pytest.fixture(scope="session")
def preset_sources():
    """The three doubly binary presets, one source object each (the
    per-source context cache is keyed by object identity)."""
    return {tau: BinaryExample(0.05, tau).source() for tau in (0.12, 0.35, 0.5)}


@pytest.fixture(scope="session")
def h_cond_05():
    p = 0.05
    return -p * math.log(p) - (1 - p) * math.log(1 - p)


def random_source(rng: np.random.Generator, kx: int, ky: int):
    """A random strictly positive joint source (retrying degenerate draws)."""
    from swexp.info_core import JointSource

    for _ in range(100):
        joint = rng.dirichlet(np.ones(kx * ky)).reshape(kx, ky)
        joint = 0.98 * joint + 0.02 / (kx * ky)
        try:
            return JointSource(joint)
        except ValueError:
            continue
    raise RuntimeError("could not draw a valid source")
