import numpy as np
import pytest
from hypothesis import HealthCheck, settings

from epnlab.domain import classify_point
from epnlab.model import CouplingVector

settings.register_profile(
    "epnlab", deadline=None, max_examples=60,
    suppress_health_check=[HealthCheck.too_slow],
)
settings.load_profile("epnlab")


def in_domain_samples(n: int, count: int, seed: int = 0, box: float = 1.5) -> list[CouplingVector]:
    """``count`` random couplings with a real, non-degenerate spectrum (rejection sampling)."""
    rng = np.random.default_rng(seed)
    out = []
    while len(out) < count:
        c = CouplingVector(n, tuple(rng.uniform(-box, box, n // 2)))
        if classify_point(c).inside:
            out.append(c)
    return out


@pytest.fixture
def rng():
    return np.random.default_rng(12345)


@pytest.fixture
def in_domain():
    return in_domain_samples
