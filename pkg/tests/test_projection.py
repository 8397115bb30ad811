import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from hypothesis.extra.numpy import arrays

from toppush import project, project_oracle, rho
from toppush.core import feasibility_residual

vec = arrays(np.float64, st.integers(1, 30), elements=st.floats(-5, 5, allow_nan=False))
EXAMPLES = [
    ([0.5, 0.5], [1.0], [0.5, 0.5], [1.0]),
    ([2.0, 1.0], [0.5], [7 / 6, 1 / 6], [4 / 3]),
    ([-1.0], [-2.0], [0.0], [0.0]),
    ([0.3], [0.3], [0.3], [0.3]),
]


def bisection_gamma(a0, b0):
    """Independent root of rho by bisection (rho is nonincreasing)."""
    lo, hi = -np.max(b0) - 1.0, np.max(a0) + 1.0
    for _ in range(200):
        mid = 0.5 * (lo + hi)
        if rho(mid, a0, b0) > 0:
            lo = mid
        else:
            hi = mid
    return 0.5 * (lo + hi)


@pytest.mark.parametrize("gamma, a0, b0, expected", [
    (0.0, [1.0], [0.0], 1.0),
    (0.5, [1.0], [0.0], 0.0),
])
def test_rho_examples(gamma, a0, b0, expected):
    assert rho(gamma, a0, b0) == expected


def test_rho_large_gamma_nonpositive():
    assert rho(1e6, [0.1, -0.2], [0.3]) <= 0


@pytest.mark.parametrize("fn", [project, project_oracle])
@pytest.mark.parametrize("a0, b0, a, b", EXAMPLES)
def test_worked_examples(fn, a0, b0, a, b):
    res = fn(a0, b0)
    np.testing.assert_allclose(res.alpha, a, atol=1e-12)
    np.testing.assert_allclose(res.beta, b, atol=1e-12)


def test_gamma_values():
    assert project([0.5, 0.5], [1.0]).gamma == pytest.approx(0.0, abs=1e-12)
    assert project([2.0, 1.0], [0.5]).gamma == pytest.approx(5 / 6)
    assert project_oracle([2.0, 1.0], [0.5]).gamma == pytest.approx(5 / 6)


def test_zero_solution_matches_grid_search():
    # feasible points for m = n = 1 are alpha = beta = t >= 0
    t = np.linspace(0.0, 5.0, 50_001)
    obj = 0.5 * (t + 1.0) ** 2 + 0.5 * (t + 2.0) ** 2
    assert t[np.argmin(obj)] == 0.0
    res = project([-1.0], [-2.0])
    assert res.alpha[0] == 0.0 and res.beta[0] == 0.0
    # gamma is pinned to the left end of rho's zero interval
    assert res.gamma == project_oracle([-1.0], [-2.0]).gamma == -1.0


def test_against_bisection_oracle():
    rng = np.random.default_rng(3)
    for _ in range(300):
        a0 = rng.uniform(-5, 5, rng.integers(1, 40))
        b0 = rng.uniform(-5, 5, rng.integers(1, 40))
        res = project(a0, b0, rng_seed=int(rng.integers(1000)))
        if np.max(a0) + np.max(b0) <= 0:
            assert res.alpha.sum() == 0.0
            continue
        g = bisection_gamma(a0, b0)
        np.testing.assert_allclose(res.alpha, np.maximum(a0 - g, 0), atol=1e-9)
        np.testing.assert_allclose(res.beta, np.maximum(b0 + g, 0), atol=1e-9)


def test_matches_oracle_with_ties():
    rng = np.random.default_rng(11)
    for _ in range(500):
        a0 = rng.integers(-3, 4, rng.integers(1, 20)).astype(float)
        b0 = rng.integers(-3, 4, rng.integers(1, 20)).astype(float)
        r1, r2 = project(a0, b0, rng_seed=int(rng.integers(100))), project_oracle(a0, b0)
        np.testing.assert_allclose(r1.alpha, r2.alpha, atol=1e-12)
        np.testing.assert_allclose(r1.beta, r2.beta, atol=1e-12)


def test_rejects_bad_input():
    with pytest.raises(ValueError):
        project([], [1.0])
    with pytest.raises(ValueError):
        project([np.nan], [1.0])


@settings(max_examples=200, deadline=None)
@given(vec, vec, st.integers(0, 2**31 - 1))
def test_properties(a0, b0, seed):
    res = project(a0, b0, rng_seed=seed)
    assert np.all(res.alpha >= 0) and np.all(res.beta >= 0)
    assert feasibility_residual(res.alpha, res.beta) <= 1e-9
    # idempotent, and independent of the pivot seed
    again = project(res.alpha, res.beta, rng_seed=seed + 1)
    np.testing.assert_array_equal(again.alpha, res.alpha)
    np.testing.assert_array_equal(again.beta, res.beta)
    other = project(a0, b0, rng_seed=seed ^ 12345)
    np.testing.assert_allclose(other.alpha, res.alpha, atol=1e-12)
    oracle = project_oracle(a0, b0)
    np.testing.assert_allclose(oracle.alpha, res.alpha, atol=1e-9)
    np.testing.assert_allclose(oracle.beta, res.beta, atol=1e-9)


@settings(max_examples=100, deadline=None)
@given(vec, vec, st.integers(0, 1000))
def test_variational_inequality(a0, b0, seed):
    # <x0 - P(x0), y - P(x0)> <= 0 for every feasible y
    res = project(a0, b0)
    rng = np.random.default_rng(seed)
    for _ in range(5):
        ya = rng.exponential(size=a0.size)
        yb = rng.exponential(size=b0.size)
        yb *= ya.sum() / yb.sum()
        ip = (a0 - res.alpha) @ (ya - res.alpha) + (b0 - res.beta) @ (yb - res.beta)
        assert ip <= 1e-9 * (1 + np.abs(ya).sum() + np.abs(yb).sum())


def test_idempotent_after_cancellation():
    # beta0 + gamma cancels heavily here, leaving a ~1e-15 sum mismatch
    res = project([-2.0078125], [2.015625] * 5)
    again = project(res.alpha, res.beta, rng_seed=1)
    np.testing.assert_array_equal(again.alpha, res.alpha)
    np.testing.assert_array_equal(again.beta, res.beta)
