import numpy as np
import pytest

from pcreg import se3


def random_transform(rng, max_translation=1.0):
    q = rng.normal(size=4)
    q /= np.linalg.norm(q)
    t = rng.uniform(-max_translation, max_translation, size=3)
    return se3.Transform(se3.Rotation(q), t)


def rodrigues(axis, angle):
    """Independent rotation-matrix construction for oracle checks."""
    axis = np.asarray(axis, dtype=float)
    axis = axis / np.linalg.norm(axis)
    k = np.array([
        [0.0, -axis[2], axis[1]],
        [axis[2], 0.0, -axis[0]],
        [-axis[1], axis[0], 0.0],
    ])
    return np.eye(3) + np.sin(angle) * k + (1 - np.cos(angle)) * (k @ k)


def homogeneous(rot3, trans):
    m = np.eye(4)
    m[:3, :3] = rot3
    m[:3, 3] = trans
    return m


@pytest.fixture
def rng():
    return np.random.default_rng(20240901)
