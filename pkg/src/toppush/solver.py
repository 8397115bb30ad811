"""Dual TopPush trainer.

The primal problem

    min_w  lam/2 ||w||^2 + 1/m sum_i l(max_j w.x_j^- - w.x_i^+)

is solved through its dual over ``alpha`` (length m) and ``beta`` (length n):

    min  g(alpha, beta) = ||nu||^2 / (2 lam m) + sum_i l*(alpha_i),
    nu = X+^T alpha - X-^T beta,
    s.t. alpha >= 0, beta >= 0, sum(alpha) == sum(beta),

with an accelerated projected gradient method (Nesterov momentum, L doubled
until a sufficient-decrease test passes).  The primal solution is recovered as
``w = nu / (lam m)``.  Each iteration costs O(nnz(X)) for the two
matrix-vector passes plus an expected O(m + n) projection.
"""

from __future__ import annotations

import logging
import math
import time
from dataclasses import dataclass
from typing import Callable, NamedTuple

import numpy as np

from .core import DualState, Model, RankingDataset, feasibility_residual
from .exceptions import DimensionMismatch, DomainViolation, NonFiniteValue
from .loss import LossKind, conjugate_derivative, conjugate_value, loss_value
from .projection import project

logger = logging.getLogger(__name__)

DEFAULT_LAMBDA = 1.0
DEFAULT_EPSILON = 1e-4
DEFAULT_MAX_ITERATIONS = 100_000
# cap on L doublings within one iteration; only reachable through round-off
_MAX_DOUBLINGS = 200


@dataclass(frozen=True)
class SolverConfig:
    lam: float = DEFAULT_LAMBDA
    epsilon: float = DEFAULT_EPSILON
    max_iterations: int = DEFAULT_MAX_ITERATIONS
    loss_kind: LossKind = LossKind.TRUNCATED_QUADRATIC
    rng_seed: int = 0
    record_trace: bool = False

    def __post_init__(self):
        if not (math.isfinite(self.lam) and self.lam > 0):
            raise ValueError(f"lambda must be positive, got {self.lam!r}")
        if not (math.isfinite(self.epsilon) and self.epsilon > 0):
            raise ValueError(f"epsilon must be positive, got {self.epsilon!r}")
        if int(self.max_iterations) < 1:
            raise ValueError("max_iterations must be at least 1")
        object.__setattr__(self, "loss_kind", LossKind(self.loss_kind))


class TraceRecord(NamedTuple):
    k: int
    g_value: float
    L: float
    line_search_doublings: int
    feasibility_residual: float
    seconds: float


@dataclass(frozen=True, eq=False)
class SolveOutcome:
    model: Model
    dual: DualState
    iterations: int
    final_gap_estimate: float
    converged: bool
    primal_value: float
    dual_value: float
    trace: list[TraceRecord] | None = None


def _check_lengths(alpha, beta, data):
    alpha = np.asarray(alpha, dtype=np.float64).ravel()
    beta = np.asarray(beta, dtype=np.float64).ravel()
    if alpha.size != data.m or beta.size != data.n:
        raise DimensionMismatch(
            f"dual lengths ({alpha.size}, {beta.size}) do not match (m, n) = ({data.m}, {data.n})"
        )
    return alpha, beta


def _nu(alpha, beta, data):
    return data.positives.csr.T @ alpha - data.negatives.csr.T @ beta


def dual_objective(alpha, beta, data: RankingDataset, lam: float,
                   kind=LossKind.TRUNCATED_QUADRATIC) -> float:
    alpha, beta = _check_lengths(alpha, beta, data)
    if np.any(alpha < 0):
        raise DomainViolation("alpha must be nonnegative")
    nu = _nu(alpha, beta, data)
    return float(nu @ nu) / (2.0 * lam * data.m) + float(np.sum(conjugate_value(kind, alpha)))


def dual_gradient(alpha, beta, data: RankingDataset, lam: float,
                  kind=LossKind.TRUNCATED_QUADRATIC):
    """Gradient of the dual objective as ``(g_alpha, g_beta)``."""
    alpha, beta = _check_lengths(alpha, beta, data)
    if np.any(alpha < 0):
        raise DomainViolation("alpha must be nonnegative")
    nu = _nu(alpha, beta, data)
    scale = 1.0 / (lam * data.m)
    g_alpha = scale * (data.positives.csr @ nu) + conjugate_derivative(kind, alpha)
    g_beta = -scale * (data.negatives.csr @ nu)
    return np.asarray(g_alpha, dtype=np.float64), np.asarray(g_beta, dtype=np.float64)


def recover_primal(alpha, beta, data: RankingDataset, lam: float) -> np.ndarray:
    alpha, beta = _check_lengths(alpha, beta, data)
    return _nu(alpha, beta, data) / (lam * data.m)


def primal_objective(w, data: RankingDataset, lam: float,
                     kind=LossKind.TRUNCATED_QUADRATIC) -> float:
    w = np.asarray(w, dtype=np.float64).ravel()
    if w.size != data.d:
        raise DimensionMismatch(f"weights have length {w.size}, data has d={data.d}")
    top_negative = float(np.max(data.negatives.csr @ w))
    margins = top_negative - data.positives.csr @ w
    return 0.5 * lam * float(w @ w) + float(np.mean(loss_value(kind, margins)))


def duality_gap(alpha, beta, data: RankingDataset, lam: float,
                kind=LossKind.TRUNCATED_QUADRATIC) -> float:
    """Primal value at the recovered ``w`` minus the dual function value.

    The dual function equals ``-g / m``, so the gap is ``P(w) + g / m``;
    it is nonnegative for feasible duals and zero at the optimum.
    """
    w = recover_primal(alpha, beta, data, lam)
    return primal_objective(w, data, lam, kind) + dual_objective(alpha, beta, data, lam, kind) / data.m


def solve(data: RankingDataset, config: SolverConfig | None = None,
          callback: Callable[[int, np.ndarray, np.ndarray], None] | None = None) -> SolveOutcome:
    """Train a TopPush model.

    Parameters
    ----------
    data : RankingDataset
        Needs at least one positive and one negative instance.
    config : SolverConfig, optional
        Defaults to ``lam=1``, ``epsilon=1e-4``.
    callback : callable, optional
        Called as ``callback(k, alpha, beta)`` after every accepted step.

    Returns
    -------
    SolveOutcome
        ``converged`` is False when ``max_iterations`` ran out before the
        objective change dropped below ``epsilon``.
    """
    config = config or SolverConfig()
    data.require_both_classes("training data")
    kind = config.loss_kind
    lam = config.lam
    m, n = data.m, data.n
    Xp = data.positives.csr
    Xn = data.negatives.csr
    XpT = Xp.T
    XnT = Xn.T
    inv = 1.0 / (lam * m)

    def value(alpha, nu):
        return 0.5 * inv * float(nu @ nu) + float(np.sum(conjugate_value(kind, alpha, extend=True)))

    alpha_prev = alpha = np.zeros(m)
    beta_prev = beta = np.zeros(n)
    nu_prev = nu = np.zeros(data.d)
    g_cur = 0.0
    L = 1.0 / (m + n)
    t_old, t = 0.0, 1.0
    # one pivot stream for the whole run; reusing a fixed seed per call would
    # replay the same pivot path on the slowly changing iterates
    pivot_rng = np.random.default_rng(config.rng_seed)
    trace = [] if config.record_trace else None
    converged = False
    k = 0

    for k in range(1, int(config.max_iterations) + 1):
        tic = time.perf_counter()
        omega = 0.0 if k == 1 else (t_old - 1.0) / t
        s_alpha = alpha + omega * (alpha - alpha_prev)
        s_beta = beta + omega * (beta - beta_prev)
        nu_s = nu + omega * (nu - nu_prev)  # nu is linear in the duals
        g_s = value(s_alpha, nu_s)
        grad_alpha = inv * (Xp @ nu_s) + conjugate_derivative(kind, s_alpha, extend=True)
        grad_beta = -inv * (Xn @ nu_s)

        doublings = 0
        while True:
            proj = project(s_alpha - grad_alpha / L, s_beta - grad_beta / L, pivot_rng)
            nu_new = XpT @ proj.alpha - XnT @ proj.beta
            g_new = value(proj.alpha, nu_new)
            d_alpha = proj.alpha - s_alpha
            d_beta = proj.beta - s_beta
            bound = (g_s + float(grad_alpha @ d_alpha) + float(grad_beta @ d_beta)
                     + 0.5 * L * (float(d_alpha @ d_alpha) + float(d_beta @ d_beta)))
            # relative slack absorbs round-off once steps become tiny
            if g_new <= bound + 1e-12 * max(1.0, abs(g_s)) or doublings >= _MAX_DOUBLINGS:
                break
            L *= 2.0
            doublings += 1

        if not math.isfinite(g_new):
            raise NonFiniteValue(f"dual objective became non-finite at iteration {k}")

        t_old, t = t, 0.5 * (1.0 + math.sqrt(1.0 + 4.0 * t * t))
        alpha_prev, alpha = alpha, proj.alpha
        beta_prev, beta = beta, proj.beta
        nu_prev, nu = nu, nu_new
        g_prev, g_cur = g_cur, g_new

        if trace is not None:
            trace.append(TraceRecord(k, g_cur, L, doublings,
                                     feasibility_residual(alpha, beta),
                                     time.perf_counter() - tic))
        if callback is not None:
            callback(k, alpha, beta)
        step_decrease = 0.5 * L * (float(d_alpha @ d_alpha) + float(d_beta @ d_beta))
        if abs(g_cur - g_prev) < config.epsilon and step_decrease < config.epsilon:
            converged = True
            break

    if not converged:
        logger.warning("TopPush stopped after %d iterations without reaching epsilon=%g",
                       k, config.epsilon)

    w = nu * inv
    primal = primal_objective(w, data, lam, kind)
    model = Model(w=w, lam=lam, loss_kind=kind, trained_epsilon=config.epsilon, iterations_used=k)
    return SolveOutcome(
        model=model,
        dual=DualState(alpha, beta),
        iterations=k,
        final_gap_estimate=primal + g_cur / m,
        converged=converged,
        primal_value=primal,
        dual_value=g_cur,
        trace=trace,
    )
