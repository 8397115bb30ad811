"""Surrogate losses and their convex conjugates.

Only the truncated quadratic ``l(z) = max(0, 1 + z)**2`` is implemented.  Its
conjugate is ``l*(a) = -a + a**2 / 4`` on ``a >= 0``.  All functions accept
scalars or arrays and return the same shape.
"""

from __future__ import annotations

import enum

import numpy as np

from .exceptions import DomainViolation, NonFiniteValue


class LossKind(str, enum.Enum):
    TRUNCATED_QUADRATIC = "truncated_quadratic"


def _check_kind(kind):
    kind = LossKind(kind)
    if kind is not LossKind.TRUNCATED_QUADRATIC:  # pragma: no cover - single member today
        raise NotImplementedError(f"loss {kind.value!r} is not implemented")
    return kind


def _out(x):
    return float(x) if np.ndim(x) == 0 else x


def loss_value(kind, z):
    """Surrogate penalty for a (negative-minus-positive) score difference ``z``."""
    _check_kind(kind)
    z = np.asarray(z, dtype=np.float64)
    if not np.all(np.isfinite(z)):
        raise NonFiniteValue("loss argument must be finite")
    return _out(np.square(np.maximum(0.0, 1.0 + z)))


def _check_domain(a):
    a = np.asarray(a, dtype=np.float64)
    if np.any(a < 0):
        raise DomainViolation("conjugate argument must be nonnegative")
    return a


def conjugate_value(kind, a, *, extend=False):
    """Convex conjugate ``l*(a)``.

    With ``extend=True`` the quadratic formula is evaluated for negative ``a``
    too instead of raising; the solver needs this at extrapolated points that
    lie outside the feasible set.
    """
    _check_kind(kind)
    a = np.asarray(a, dtype=np.float64) if extend else _check_domain(a)
    return _out(-a + 0.25 * a * a)


def conjugate_derivative(kind, a, *, extend=False):
    _check_kind(kind)
    a = np.asarray(a, dtype=np.float64) if extend else _check_domain(a)
    return _out(-1.0 + 0.5 * a)
