import numpy as np
import pytest
from hypothesis import HealthCheck, settings

settings.register_profile(
    "suite",
    max_examples=40,
    deadline=None,
    derandomize=True,
    suppress_health_check=[HealthCheck.too_slow],
)
settings.load_profile("suite")


@pytest.fixture
def rng():
    return np.random.default_rng(1234)


def tridiag_moments(diag, off, k):
    """Independent oracle: moments of a Jacobi matrix at the first basis vector."""
    diag = np.asarray(diag, dtype=float)
    off = np.asarray(off, dtype=float)
    vec = np.zeros(diag.size)
    vec[0] = 1.0
    out = [1.0]
    for _ in range(k):
        nxt = diag * vec
        if diag.size > 1:
            nxt[:-1] += off * vec[1:]
            nxt[1:] += off * vec[:-1]
        vec = nxt
        out.append(float(vec[0]))
    return np.array(out)
