import numpy as np
import pytest

from specshape.analysis import analyze
from specshape.bessel import bessel_zero
from specshape.geometry import FourierBoundary

J01 = bessel_zero(0, 1)
J11 = bessel_zero(1, 1)
R_STAR = (J01 ** 2 / np.pi) ** (1.0 / 3.0)


def random_boundary(rng, order=8, amp=0.05, a0=1.0):
    return FourierBoundary(a0, rng.uniform(-amp, amp, order), rng.uniform(-amp, amp, order))


@pytest.fixture(scope="session")
def disk():
    return FourierBoundary.circle(1.0, 8)


@pytest.fixture(scope="session")
def disk_k1(disk):
    return analyze(disk, 1, 40, 80)


@pytest.fixture(scope="session")
def disk_k2(disk):
    return analyze(disk, 2, 40, 80)


@pytest.fixture(scope="session")
def star_disk_k1():
    return analyze(FourierBoundary.circle(R_STAR, 8), 1, 40, 80)
