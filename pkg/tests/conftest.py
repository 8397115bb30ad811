import numpy as np
import pytest

from toppush import build_dataset


def random_instance(rng, m_max=20, n_max=20, d_max=10, m_min=1, n_min=1):
    m = int(rng.integers(m_min, m_max + 1))
    n = int(rng.integers(n_min, n_max + 1))
    d = int(rng.integers(1, d_max + 1))
    Xp = rng.normal(size=(m, d))
    Xn = rng.normal(size=(n, d))
    # sparsify a little so the CSR paths see explicit gaps
    Xp[rng.random(Xp.shape) < 0.2] = 0.0
    Xn[rng.random(Xn.shape) < 0.2] = 0.0
    return build_dataset(Xp, Xn)


def random_feasible(rng, m, n):
    alpha = rng.exponential(size=m)
    beta = rng.exponential(size=n)
    beta *= alpha.sum() / beta.sum()
    return alpha, beta


@pytest.fixture
def toy():
    """m = n = 1, d = 1, x+ = [1], x- = [-1]."""
    return build_dataset([[1.0]], [[-1.0]])


@pytest.fixture
def basis_pair():
    """One positive {0:1}, one negative {1:1}."""
    return build_dataset([[1.0, 0.0]], [[0.0, 1.0]])


@pytest.fixture
def tiny_libsvm(tmp_path):
    p = tmp_path / "tiny.libsvm"
    p.write_text("+1 1:1.0 2:0.5\n-1 1:-1.0\n+1 2:1\n-1 1:0.2 2:-0.3\n")
    return p
