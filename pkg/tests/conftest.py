import numpy as np
import pytest

from heterorec import build_graph


def random_graph(rng, n, m, p_lo=0.05, p_hi=0.95):
    """Random simple directed graph with n nodes and exactly m edges."""
    assert m <= n * (n - 1)
    pairs = set()
    while len(pairs) < m:
        u = int(rng.integers(0, n))
        v = int(rng.integers(0, n))
        if u != v:
            pairs.add((u, v))
    accept = rng.uniform(p_lo, p_hi, n)
    edges = [(u, v, float(rng.uniform(p_lo, p_hi))) for u, v in sorted(pairs)]
    return build_graph(accept, edges)


@pytest.fixture
def rng():
    return np.random.default_rng(2024)
