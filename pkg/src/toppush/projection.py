"""Euclidean projection onto ``{alpha >= 0, beta >= 0, sum(alpha) == sum(beta)}``.

The projection of ``(alpha0, beta0)`` is ``([alpha0 - g]_+, [beta0 + g]_+)``
where ``g`` is the root of the piecewise-linear, non-increasing function

    rho(g) = sum_i [alpha0_i - g]_+ - sum_j [beta0_j + g]_+ .

:func:`project` finds the root in expected linear time with a randomized
selection over the breakpoints ``{alpha0_i} U {-beta0_j}``, keeping running
partial sums so no element is visited more than a constant number of times in
expectation.  :func:`project_oracle` sorts the breakpoints and scans them; it
is the O(N log N) reference used to check the fast path.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .exceptions import NonFiniteValue

_FEASIBLE_TOL = 1e-12


@dataclass(frozen=True, eq=False)
class ProjectionResult:
    alpha: np.ndarray
    beta: np.ndarray
    gamma: float


def _inputs(alpha0, beta0):
    a = np.asarray(alpha0, dtype=np.float64).ravel()
    b = np.asarray(beta0, dtype=np.float64).ravel()
    if a.size < 1 or b.size < 1:
        raise ValueError("projection needs at least one alpha and one beta coordinate")
    if not (np.all(np.isfinite(a)) and np.all(np.isfinite(b))):
        raise NonFiniteValue("projection input must be finite")
    return a, b


def _already_feasible(a, b):
    # points of the domain up to round-off in the sums map to themselves,
    # which makes the projection exactly idempotent
    if a.min() < 0.0 or b.min() < 0.0:
        return False
    sa, sb = float(a.sum()), float(b.sum())
    return abs(sa - sb) <= _FEASIBLE_TOL * max(1.0, sa, sb)


def rho(gamma: float, alpha0, beta0) -> float:
    a = np.asarray(alpha0, dtype=np.float64)
    b = np.asarray(beta0, dtype=np.float64)
    return float(np.maximum(a - gamma, 0.0).sum() - np.maximum(b + gamma, 0.0).sum())


def _zero_solution(a, b):
    # rho vanishes on [max(a), -max(b)]; report the left end
    g = float(a.max())
    return ProjectionResult(np.zeros_like(a), np.zeros_like(b), g)


def _finish(a, b, g):
    # Recompute g from the active sets with array-order sums, so the result
    # does not depend on the order in which the search accumulated them.
    for _ in range(2):
        act_a = a > g
        act_b = b > -g
        cnt = int(act_a.sum()) + int(act_b.sum())
        if cnt == 0:
            break
        g = (float(a[act_a].sum()) - float(b[act_b].sum())) / cnt
    return ProjectionResult(np.maximum(a - g, 0.0), np.maximum(b + g, 0.0), float(g))


def project(alpha0, beta0, rng_seed: int | np.random.Generator = 0) -> ProjectionResult:
    """Exact projection by randomized pivoting.

    ``rng_seed`` (a seed or a Generator to draw from) only steers pivot
    choice, and thus running time; the result does not depend on it.
    """
    a, b = _inputs(alpha0, beta0)
    if a.max() + b.max() <= 0.0:
        return _zero_solution(a, b)
    if _already_feasible(a, b):
        return ProjectionResult(a.copy(), b.copy(), 0.0)

    rng = np.random.default_rng(rng_seed)
    ua = a
    ub = -b
    # running sums/counts of breakpoints already known to be active at the root
    s_a = s_b = 0.0
    n_a = n_b = 0
    while ua.size or ub.size:
        r = int(rng.integers(ua.size + ub.size))
        u = ua[r] if r < ua.size else ub[r - ua.size]

        # elements equal to the pivot are settled together with it, so ties
        # cannot make the search quadratic
        ge_a = ua >= u
        le_b = ub <= u
        above_a = ge_a & (ua > u)
        below_b = le_b & (ub < u)
        s = s_a + s_b + float(ua[above_a].sum()) + float(ub[below_b].sum())
        cnt = n_a + n_b + int(np.count_nonzero(above_a)) + int(np.count_nonzero(below_b))
        r_u = s - cnt * u  # rho(u)
        if r_u < 0:
            # root below u: alphas >= u are active, betas with -beta0 >= u are not
            s_a += float(ua[ge_a].sum())
            n_a += int(np.count_nonzero(ge_a))
            ua = ua[~ge_a]
            ub = ub[ub < u]
        elif r_u > 0:
            # root above u: betas with -beta0 <= u are active, alphas <= u are not
            s_b += float(ub[le_b].sum())
            n_b += int(np.count_nonzero(le_b))
            ua = ua[ua > u]
            ub = ub[~le_b]
        else:
            return _finish(a, b, float(u))

    if n_a + n_b == 0:  # pragma: no cover - excluded by the zero-solution test above
        return _zero_solution(a, b)
    return _finish(a, b, (s_a + s_b) / (n_a + n_b))


def project_oracle(alpha0, beta0) -> ProjectionResult:
    """Sort-based reference projection (O(N log N))."""
    a, b = _inputs(alpha0, beta0)
    if a.max() + b.max() <= 0.0:
        return _zero_solution(a, b)
    if _already_feasible(a, b):
        return ProjectionResult(a.copy(), b.copy(), 0.0)

    u_beta = -b
    a_sorted = np.sort(a)
    ub_sorted = np.sort(u_beta)
    a_suffix = np.concatenate([np.cumsum(a_sorted[::-1])[::-1], [0.0]])
    ub_prefix = np.concatenate([[0.0], np.cumsum(ub_sorted)])

    points = np.sort(np.concatenate([a, u_beta]))
    # rho at every breakpoint from partial sums
    ia = np.searchsorted(a_sorted, points, side="right")  # first alpha > point
    jb = np.searchsorted(ub_sorted, points, side="right")  # betas <= point
    n_act = (a.size - ia) + jb
    rho_pts = a_suffix[ia] + ub_prefix[jb] - n_act * points

    k = int(np.argmax(rho_pts <= 0.0))  # rho at the largest breakpoint is always <= 0
    if k == 0:
        # root left of every breakpoint: all alphas active, no beta
        return _finish(a, b, float(a.sum()) / a.size)
    left = points[k - 1]
    active_a = a > left
    active_b = u_beta <= left
    g = (float(a[active_a].sum()) + float(u_beta[active_b].sum())) / (
        int(active_a.sum()) + int(active_b.sum())
    )
    return _finish(a, b, g)
