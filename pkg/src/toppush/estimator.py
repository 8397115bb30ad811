"""scikit-learn compatible wrapper around the TopPush solver."""

from __future__ import annotations

import numpy as np
import scipy.sparse as sp
from sklearn.base import BaseEstimator
from sklearn.utils.validation import check_array, check_is_fitted, check_X_y

from .core import FeatureMatrix, Model, RankingDataset
from .data_io import scale_to_unit_ball
from .exceptions import EmptyClass
from .loss import LossKind
from .metrics import pos_at_top
from .solver import DEFAULT_EPSILON, DEFAULT_LAMBDA, DEFAULT_MAX_ITERATIONS, SolverConfig, solve


class TopPushRanker(BaseEstimator):
    """Linear bipartite ranker that pushes positives above the top negative.

    Labels ``> 0`` are positive, everything else negative.  After ``fit``,
    ``decision_function`` returns ranking scores ``X @ coef_`` on the raw
    (unscaled) features, and ``score`` reports Pos@Top.

    Parameters
    ----------
    lam : float
        L2 regularization strength.
    epsilon : float
        Stop once the dual objective changes by less than this.
    max_iter : int
        Iteration cap.
    scale_features : bool
        Divide the training rows by their largest norm before solving.
        The learned ``coef_`` is mapped back to raw feature units.
    random_state : int
        Seed for pivot selection in the projection step; results do not
        depend on it.
    """

    def __init__(self, lam=DEFAULT_LAMBDA, epsilon=DEFAULT_EPSILON,
                 max_iter=DEFAULT_MAX_ITERATIONS, scale_features=False, random_state=0):
        self.lam = lam
        self.epsilon = epsilon
        self.max_iter = max_iter
        self.scale_features = scale_features
        self.random_state = random_state

    def fit(self, X, y):
        X, y = check_X_y(X, y, accept_sparse="csr", dtype=np.float64)
        X = sp.csr_matrix(X)
        pos = np.asarray(y) > 0
        if pos.all() or not pos.any():
            raise EmptyClass("fit needs both positive and negative labels")
        data = RankingDataset(FeatureMatrix(X[pos]), FeatureMatrix(X[~pos]))
        factor = 1.0
        if self.scale_features:
            data, factor = scale_to_unit_ball(data)
        config = SolverConfig(lam=self.lam, epsilon=self.epsilon, max_iterations=self.max_iter,
                              loss_kind=LossKind.TRUNCATED_QUADRATIC,
                              rng_seed=self.random_state)
        outcome = solve(data, config)
        self.model_ = Model(w=outcome.model.w, lam=self.lam, trained_epsilon=self.epsilon,
                            iterations_used=outcome.iterations, scale_factor=factor)
        self.coef_ = outcome.model.w / factor
        self.dual_ = outcome.dual
        self.n_iter_ = outcome.iterations
        self.converged_ = outcome.converged
        self.duality_gap_ = outcome.final_gap_estimate
        self.n_features_in_ = X.shape[1]
        return self

    def decision_function(self, X):
        check_is_fitted(self, "coef_")
        X = check_array(X, accept_sparse="csr", dtype=np.float64)
        if X.shape[1] != self.n_features_in_:
            raise ValueError(
                f"X has {X.shape[1]} features, but {type(self).__name__} "
                f"is expecting {self.n_features_in_} features as input"
            )
        return np.asarray(X @ self.coef_).ravel()

    def score(self, X, y):
        """Pos@Top of the ranking induced on ``(X, y)``."""
        s = self.decision_function(X)
        pos = np.asarray(y) > 0
        return pos_at_top((s[pos], s[~pos]))
