import numpy as np
import pytest


@pytest.fixture
def rng():
    return np.random.default_rng(20260825)


@pytest.fixture
def make_spd():
    """Factory for random symmetric positive definite matrices."""

    def build(p: int, rng, ridge: float = 1.0) -> np.ndarray:
        B = rng.standard_normal((p, p))
        A = B @ B.T / p + ridge * np.eye(p)
        return 0.5 * (A + A.T)

    return build
