import math

import pytest

from ifs_lab import (Expanding, Flip, IfsSystem, NorthSouth, PiecewiseLinear,
                     Rotation)

GOLDEN = (math.sqrt(5.0) - 1.0) / 2.0


@pytest.fixture(scope="session")
def golden_rotation():
    return IfsSystem([Rotation(GOLDEN)])


@pytest.fixture(scope="session")
def rotation_flip():
    return IfsSystem([Rotation(GOLDEN), Flip()])


@pytest.fixture(scope="session")
def ns_alone():
    return IfsSystem([NorthSouth(0.0, 2.0)])


@pytest.fixture(scope="session")
def doubling():
    return IfsSystem([Expanding(2)])


@pytest.fixture(scope="session")
def expanding_pair():
    return IfsSystem([Expanding(2), Expanding(3)])


@pytest.fixture(scope="session")
def hinge_system():
    lam = 1.8
    f = NorthSouth(0.5, lam)
    h1 = PiecewiseLinear(((0.0, 0.0), (0.5, 0.6), (1.0, 1.0)))
    h2 = PiecewiseLinear(((0.0, 0.0), (0.5, 0.4), (1.0, 1.0)))
    return IfsSystem([f, f.inverse(), h1, h2])


@pytest.fixture(scope="session")
def ns_rotation_sym():
    ns = NorthSouth(0.0, 2.0)
    rot = Rotation(GOLDEN)
    return IfsSystem([ns, ns.inverse(), rot, rot.inverse()])
