"""TopPush: bipartite ranking that optimizes accuracy at the top in linear time."""

__version__ = "0.1.0"

from .core import (
    DualState,
    FeatureMatrix,
    FeatureVector,
    Model,
    RankingDataset,
    build_dataset,
    score,
    score_matrix,
)
from .estimator import TopPushRanker
from .exceptions import (
    DimensionMismatch,
    DomainViolation,
    EmptyClass,
    NonFiniteValue,
    ParseError,
    TopPushError,
    UnknownLabel,
)
from .loss import LossKind, conjugate_derivative, conjugate_value, loss_value
from .metrics import MetricsReport, ScoredDataset, evaluate
from .projection import ProjectionResult, project, project_oracle, rho
from .solver import (
    SolveOutcome,
    SolverConfig,
    dual_gradient,
    dual_objective,
    duality_gap,
    primal_objective,
    recover_primal,
    solve,
)

__all__ = [
    "DimensionMismatch", "DomainViolation", "DualState", "EmptyClass", "FeatureMatrix",
    "FeatureVector", "LossKind", "MetricsReport", "Model", "NonFiniteValue", "ParseError",
    "ProjectionResult", "RankingDataset", "ScoredDataset", "SolveOutcome", "SolverConfig",
    "TopPushError", "TopPushRanker", "UnknownLabel", "build_dataset", "conjugate_derivative",
    "conjugate_value", "dual_gradient", "dual_objective", "duality_gap", "evaluate",
    "loss_value", "primal_objective", "project", "project_oracle", "recover_primal", "rho",
    "score", "score_matrix", "solve",
]
