import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from toppush import DomainViolation, LossKind, NonFiniteValue
from toppush import conjugate_derivative, conjugate_value, loss_value

K = LossKind.TRUNCATED_QUADRATIC
finite = st.floats(-1e3, 1e3, allow_nan=False)


@pytest.mark.parametrize("z, expected", [(-1.0, 0.0), (0.0, 1.0), (1.0, 4.0), (-7.0, 0.0)])
def test_loss_examples(z, expected):
    assert loss_value(K, z) == expected


@pytest.mark.parametrize("a, expected", [(0.0, 0.0), (2.0, -1.0), (4.0, 0.0)])
def test_conjugate_examples(a, expected):
    assert conjugate_value(K, a) == expected


@pytest.mark.parametrize("a, expected", [(0.0, -1.0), (2.0, 0.0), (6.0, 2.0)])
def test_conjugate_derivative_examples(a, expected):
    assert conjugate_derivative(K, a) == expected


def test_conjugate_derivative_matches_finite_differences():
    h = 1e-6
    for a in [0.5, 1.0, 3.3, 6.0, 20.0]:
        fd = (conjugate_value(K, a + h) - conjugate_value(K, a - h)) / (2 * h)
        assert abs(fd - conjugate_derivative(K, a)) < 1e-4


def test_biconjugate_recovers_loss():
    # l(z) = sup_{a >= 0} a z - l*(a), evaluated on a fine grid of a
    a = np.linspace(0.0, 20.0, 200_001)
    for z in np.linspace(-3.0, 3.0, 25):
        sup = np.max(a * z - conjugate_value(K, a))
        assert abs(sup - loss_value(K, z)) < 1e-6


def test_domain_and_finiteness_errors():
    with pytest.raises(DomainViolation):
        conjugate_value(K, -0.1)
    with pytest.raises(DomainViolation):
        conjugate_derivative(K, np.array([1.0, -1.0]))
    with pytest.raises(NonFiniteValue):
        loss_value(K, np.nan)
    # the quadratic extension is available on request
    assert conjugate_value(K, -2.0, extend=True) == 2.0 + 1.0


def test_unknown_kind():
    with pytest.raises(ValueError):
        loss_value("hinge", 0.0)


def test_vectorized_shapes():
    z = np.linspace(-2, 2, 7)
    assert loss_value(K, z).shape == z.shape
    assert isinstance(loss_value(K, 0.5), float)


@given(finite, finite)
def test_loss_monotone_and_bounds_indicator(x, y):
    lo, hi = min(x, y), max(x, y)
    assert loss_value(K, lo) <= loss_value(K, hi)
    # convex surrogate upper-bounds [z >= 0]
    assert loss_value(K, x) >= float(x >= 0)


@given(st.floats(0, 1e3, allow_nan=False), st.floats(-1e2, 1e2, allow_nan=False))
def test_fenchel_young(a, z):
    assert loss_value(K, z) + conjugate_value(K, a) >= a * z - 1e-9 * max(1.0, abs(a * z))
