import numpy as np
import pytest

from grasslrr.grassmann import random_point


@pytest.fixture
def rng():
    return np.random.default_rng(12345)


def rotation(theta):
    return np.array([[np.cos(theta)], [np.sin(theta)]])


def line(theta):
    """Point of G(1, 2) at angle `theta` from e1."""
    from grasslrr.grassmann import GrassmannPoint

    return GrassmannPoint(rotation(theta))


def random_orthogonal(p, rng):
    Q, R = np.linalg.qr(rng.standard_normal((p, p)))
    return Q * np.sign(np.diag(R))


def random_pair(rng, d=50, p=5):
    return random_point(d, p, rng), random_point(d, p, rng)
