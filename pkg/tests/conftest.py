import numpy as np
import pytest


def random_unit(dim: int, rng: np.random.Generator) -> np.ndarray:
    v = rng.standard_normal(dim)
    return v / np.linalg.norm(v)


def orthonormal_frame(dim: int, rng: np.random.Generator) -> tuple[np.ndarray, np.ndarray]:
    """Two orthonormal vectors spanning a random great circle."""
    a = random_unit(dim, rng)
    b = rng.standard_normal(dim)
    b -= a * (a @ b)
    return a, b / np.linalg.norm(b)


def arc_points(a: np.ndarray, b: np.ndarray, ts) -> np.ndarray:
    """Points cos(t) a + sin(t) b on the great circle through the frame (a, b)."""
    ts = np.asarray(ts, dtype=float)
    return np.cos(ts)[:, None] * a + np.sin(ts)[:, None] * b


@pytest.fixture
def rng():
    return np.random.default_rng(12345)
