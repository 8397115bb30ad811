"""Bipartite ranking losses and top-of-list evaluation metrics.

All functions take the positive and negative score vectors of one scored
dataset.  Ties follow two different conventions on purpose: the pairwise
ranking loss, the top loss and Pos@Top count a positive tied with a negative
as an error, while AUC gives ties half credit (Wilcoxon-Mann-Whitney).  AP and
NDCG rank tied negatives above tied positives.
"""

from __future__ import annotations

from dataclasses import asdict, dataclass, fields
from typing import Callable

import numpy as np

from .exceptions import EmptyClass, NonFiniteValue
from .loss import LossKind, loss_value


@dataclass(frozen=True, eq=False)
class ScoredDataset:
    positive_scores: np.ndarray
    negative_scores: np.ndarray

    def __post_init__(self):
        pos = np.array(self.positive_scores, dtype=np.float64).ravel()
        neg = np.array(self.negative_scores, dtype=np.float64).ravel()
        if pos.size < 1:
            raise EmptyClass("no positive scores")
        if neg.size < 1:
            raise EmptyClass("no negative scores")
        if not (np.all(np.isfinite(pos)) and np.all(np.isfinite(neg))):
            raise NonFiniteValue("scores must be finite")
        pos.flags.writeable = False
        neg.flags.writeable = False
        object.__setattr__(self, "positive_scores", pos)
        object.__setattr__(self, "negative_scores", neg)

    @property
    def m(self):
        return self.positive_scores.size

    @property
    def n(self):
        return self.negative_scores.size


def _scored(s) -> ScoredDataset:
    if isinstance(s, ScoredDataset):
        return s
    pos, neg = s
    return ScoredDataset(pos, neg)


def ranking_loss(s) -> float:
    """Fraction of (positive, negative) pairs with ``f(x+) <= f(x-)``."""
    s = _scored(s)
    neg = np.sort(s.negative_scores)
    # negatives >= each positive
    errors = s.n - np.searchsorted(neg, s.positive_scores, side="left")
    return float(errors.sum()) / (s.m * s.n)


def auc(s) -> float:
    s = _scored(s)
    neg = np.sort(s.negative_scores)
    below = np.searchsorted(neg, s.positive_scores, side="left")
    tied = np.searchsorted(neg, s.positive_scores, side="right") - below
    return (float(below.sum()) + 0.5 * float(tied.sum())) / (s.m * s.n)


def top_loss(s) -> float:
    """Fraction of positives scored at or below the top negative."""
    s = _scored(s)
    return float(np.mean(s.positive_scores <= s.negative_scores.max()))


def pos_at_top(s) -> float:
    """Fraction of positives scored strictly above the top negative."""
    s = _scored(s)
    return float(np.mean(s.positive_scores > s.negative_scores.max()))


def surrogate_top_loss(s, kind=LossKind.TRUNCATED_QUADRATIC) -> float:
    s = _scored(s)
    return float(np.mean(loss_value(kind, s.negative_scores.max() - s.positive_scores)))


def infinite_push_loss(s, kind: LossKind | Callable = LossKind.TRUNCATED_QUADRATIC) -> float:
    """Worst negative's average penalty over all positives (O(mn)).

    ``kind`` may also be a vectorized callable ``z -> penalty`` applied to
    ``f(x-) - f(x+)``; pass ``zero_one`` to recover the top loss.
    """
    s = _scored(s)
    diffs = s.negative_scores[:, None] - s.positive_scores[None, :]
    penalty = kind(diffs) if callable(kind) else loss_value(kind, diffs)
    return float(np.max(np.mean(penalty, axis=1)))


def zero_one(z):
    """Indicator ``z >= 0``, i.e. ``f(x+) <= f(x-)`` for ``z = f(x-) - f(x+)``."""
    return (np.asarray(z) >= 0).astype(np.float64)


def _positive_ranks(s: ScoredDataset) -> np.ndarray:
    """1-based ranks of the positives in the merged descending list, negatives first on ties."""
    scores = np.concatenate([s.positive_scores, s.negative_scores])
    is_pos = np.concatenate([np.ones(s.m, dtype=np.int8), np.zeros(s.n, dtype=np.int8)])
    order = np.lexsort((is_pos, -scores))
    return np.flatnonzero(is_pos[order]) + 1


def average_precision(s) -> float:
    s = _scored(s)
    ranks = _positive_ranks(s)
    return float(np.mean(np.arange(1, s.m + 1) / ranks))


def ndcg(s) -> float:
    """Binary-relevance NDCG over the full ranking with a log2(1 + rank) discount."""
    s = _scored(s)
    ranks = _positive_ranks(s)
    dcg = np.sum(1.0 / np.log2(1.0 + ranks))
    ideal = np.sum(1.0 / np.log2(1.0 + np.arange(1, s.m + 1)))
    return float(dcg / ideal)


@dataclass(frozen=True)
class MetricsReport:
    pos_at_top: float
    average_precision: float
    ndcg: float
    auc: float
    ranking_loss: float
    top_loss: float
    surrogate_loss: float
    m: int
    n: int

    def to_text(self) -> str:
        """One ``key value`` pair per line; floats use ``repr`` so they round-trip."""
        lines = []
        for f in fields(self):
            v = getattr(self, f.name)
            lines.append(f"{f.name} {v!r}")
        return "\n".join(lines) + "\n"

    @classmethod
    def from_text(cls, text: str) -> MetricsReport:
        values = {}
        for line in text.splitlines():
            if not line.strip():
                continue
            key, val = line.split(None, 1)
            values[key] = val.strip()
        kw = {}
        for f in fields(cls):
            kw[f.name] = int(values[f.name]) if f.name in ("m", "n") else float(values[f.name])
        return cls(**kw)

    def as_dict(self):
        return asdict(self)


def evaluate(s, kind=LossKind.TRUNCATED_QUADRATIC) -> MetricsReport:
    s = _scored(s)
    return MetricsReport(
        pos_at_top=pos_at_top(s),
        average_precision=average_precision(s),
        ndcg=ndcg(s),
        auc=auc(s),
        ranking_loss=ranking_loss(s),
        top_loss=top_loss(s),
        surrogate_loss=surrogate_top_loss(s, kind),
        m=s.m,
        n=s.n,
    )
