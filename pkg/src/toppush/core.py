"""Domain types: sparse instances, ranking datasets, dual states and models.

Instances are stored row-wise in CSR form.  Every container here copies its
input on construction and marks the copies read-only, so objects can be shared
freely once built.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterator

import numpy as np
import scipy.sparse as sp

from .exceptions import DimensionMismatch, DomainViolation, EmptyClass, NonFiniteValue
from .loss import LossKind

FEASIBILITY_RTOL = 1e-9


def _frozen(a: np.ndarray) -> np.ndarray:
    a.flags.writeable = False
    return a


@dataclass(frozen=True, eq=False)
class FeatureVector:
    """One sparse instance: strictly increasing 0-based ``indices`` < ``d``."""

    indices: np.ndarray
    values: np.ndarray
    d: int

    def __post_init__(self):
        idx = np.array(self.indices, dtype=np.int64).ravel()
        val = np.array(self.values, dtype=np.float64).ravel()
        if idx.shape != val.shape:
            raise ValueError("indices and values must have the same length")
        d = int(self.d)
        if d < 0:
            raise ValueError("dimension must be nonnegative")
        if idx.size:
            if np.any(np.diff(idx) <= 0):
                raise ValueError("indices must be strictly increasing")
            if idx[0] < 0 or idx[-1] >= d:
                raise DimensionMismatch(f"index out of range for d={d}")
        if not np.all(np.isfinite(val)):
            raise NonFiniteValue("feature values must be finite")
        object.__setattr__(self, "indices", _frozen(idx))
        object.__setattr__(self, "values", _frozen(val))
        object.__setattr__(self, "d", d)

    @classmethod
    def from_dict(cls, entries: dict, d: int) -> FeatureVector:
        keys = sorted(entries)
        return cls(np.array(keys, dtype=np.int64), np.array([entries[k] for k in keys]), d)

    @classmethod
    def from_dense(cls, x) -> FeatureVector:
        x = np.asarray(x, dtype=np.float64).ravel()
        nz = np.flatnonzero(x)
        return cls(nz, x[nz], x.size)

    def to_dense(self) -> np.ndarray:
        out = np.zeros(self.d)
        out[self.indices] = self.values
        return out


class FeatureMatrix:
    """Row-oriented sparse instance matrix (``count`` rows, dimension ``d``).

    Accepts a scipy sparse matrix, a dense 2-D array-like, or a sequence of
    :class:`FeatureVector` (pass ``d`` when the sequence may be empty).
    """

    __slots__ = ("csr",)

    def __init__(self, data, d: int | None = None):
        if isinstance(data, FeatureMatrix):
            csr = data.csr.copy()
        elif sp.issparse(data):
            csr = sp.csr_matrix(data, dtype=np.float64, copy=True)
        elif isinstance(data, (list, tuple)) and (
            len(data) == 0 or isinstance(data[0], FeatureVector)
        ):
            csr = _rows_to_csr(data, d)
        else:
            arr = np.array(data, dtype=np.float64)
            if arr.ndim == 1 and arr.size == 0:
                arr = arr.reshape(0, d or 0)
            if arr.ndim != 2:
                raise ValueError("expected a 2-D feature array")
            if not np.all(np.isfinite(arr)):
                raise NonFiniteValue("feature values must be finite")
            csr = sp.csr_matrix(arr)
        if d is not None and csr.shape[1] != d:
            if csr.shape[1] > d:
                raise DimensionMismatch(f"matrix has {csr.shape[1]} columns, expected d={d}")
            csr.resize((csr.shape[0], d))
        if not np.all(np.isfinite(csr.data)):
            raise NonFiniteValue("feature values must be finite")
        if not csr.has_canonical_format:
            csr.sum_duplicates()
        for a in (csr.data, csr.indices, csr.indptr):
            a.flags.writeable = False
        self.csr = csr

    @property
    def d(self) -> int:
        return self.csr.shape[1]

    @property
    def count(self) -> int:
        return self.csr.shape[0]

    def __len__(self):
        return self.count

    def row(self, i: int) -> FeatureVector:
        lo, hi = self.csr.indptr[i], self.csr.indptr[i + 1]
        return FeatureVector(self.csr.indices[lo:hi], self.csr.data[lo:hi], self.d)

    @property
    def rows(self) -> Iterator[FeatureVector]:
        return (self.row(i) for i in range(self.count))

    def take(self, idx) -> FeatureMatrix:
        return FeatureMatrix(self.csr[np.asarray(idx, dtype=np.int64)], d=self.d)

    def to_dense(self) -> np.ndarray:
        return self.csr.toarray()

    def row_norms(self) -> np.ndarray:
        return np.sqrt(np.asarray(self.csr.multiply(self.csr).sum(axis=1)).ravel())

    def __repr__(self):
        return f"FeatureMatrix(count={self.count}, d={self.d}, nnz={self.csr.nnz})"


def _rows_to_csr(rows, d):
    if d is None:
        if not rows:
            raise ValueError("d is required for an empty row list")
        d = rows[0].d
    indptr = [0]
    for r in rows:
        if r.d != d:
            raise DimensionMismatch(f"row has d={r.d}, expected d={d}")
        indptr.append(indptr[-1] + r.indices.size)
    if rows:
        indices = np.concatenate([r.indices for r in rows])
        data = np.concatenate([r.values for r in rows])
    else:
        indices = np.zeros(0, dtype=np.int64)
        data = np.zeros(0)
    return sp.csr_matrix((data, indices, np.array(indptr)), shape=(len(rows), d))


@dataclass(frozen=True, eq=False)
class RankingDataset:
    """Positive and negative instances sharing one feature dimension.

    Either class may be empty here (e.g. a test split); use
    :func:`build_dataset` for the validated, trainable form.
    """

    positives: FeatureMatrix
    negatives: FeatureMatrix
    source: str | None = None

    def __post_init__(self):
        if self.positives.d != self.negatives.d:
            raise DimensionMismatch(
                f"positives have d={self.positives.d}, negatives have d={self.negatives.d}"
            )

    @property
    def d(self) -> int:
        return self.positives.d

    @property
    def m(self) -> int:
        return self.positives.count

    @property
    def n(self) -> int:
        return self.negatives.count

    def require_both_classes(self, what="dataset"):
        if self.m < 1:
            raise EmptyClass(f"{what} has no positive instances")
        if self.n < 1:
            raise EmptyClass(f"{what} has no negative instances")


def build_dataset(positives, negatives, source: str | None = None) -> RankingDataset:
    """Validate and pair the two classes into a trainable dataset.

    Raises DimensionMismatch, EmptyClass or NonFiniteValue.
    """
    pos = positives if isinstance(positives, FeatureMatrix) else FeatureMatrix(positives)
    neg = negatives if isinstance(negatives, FeatureMatrix) else FeatureMatrix(negatives)
    if pos.count == 0:
        raise EmptyClass("dataset has no positive instances")
    if neg.count == 0:
        raise EmptyClass("dataset has no negative instances")
    return RankingDataset(pos, neg, source)


@dataclass(frozen=True, eq=False)
class DualState:
    """Feasible dual pair: nonnegative, with equal coordinate sums."""

    alpha: np.ndarray
    beta: np.ndarray

    def __post_init__(self):
        a = np.array(self.alpha, dtype=np.float64).ravel()
        b = np.array(self.beta, dtype=np.float64).ravel()
        if not (np.all(np.isfinite(a)) and np.all(np.isfinite(b))):
            raise NonFiniteValue("dual variables must be finite")
        if np.any(a < 0) or np.any(b < 0):
            raise DomainViolation("dual variables must be nonnegative")
        if feasibility_residual(a, b) > FEASIBILITY_RTOL:
            raise DomainViolation(
                f"dual sums differ: sum(alpha)={a.sum()!r}, sum(beta)={b.sum()!r}"
            )
        object.__setattr__(self, "alpha", _frozen(a))
        object.__setattr__(self, "beta", _frozen(b))


def feasibility_residual(alpha, beta) -> float:
    """Relative mismatch of the two coordinate sums."""
    sa = float(np.sum(alpha))
    return abs(sa - float(np.sum(beta))) / max(1.0, abs(sa))


@dataclass(frozen=True, eq=False)
class Model:
    """Linear scorer ``f(x) = w.x`` plus the configuration it was trained with.

    ``scale_factor`` is the unit-ball divisor applied to the training
    features; :func:`toppush.data_io.transform_features` reapplies it.
    """

    w: np.ndarray
    lam: float
    loss_kind: LossKind = LossKind.TRUNCATED_QUADRATIC
    trained_epsilon: float = 1e-4
    iterations_used: int = 0
    scale_factor: float = 1.0

    def __post_init__(self):
        w = np.array(self.w, dtype=np.float64).ravel()
        if not np.all(np.isfinite(w)):
            raise NonFiniteValue("model weights must be finite")
        if not self.lam > 0:
            raise ValueError("lambda must be positive")
        object.__setattr__(self, "w", _frozen(w))
        object.__setattr__(self, "loss_kind", LossKind(self.loss_kind))

    @property
    def d(self) -> int:
        return self.w.size


def score(model, x: FeatureVector) -> float:
    """Return ``w.x`` for one sparse instance. ``model`` may be a Model or a weight vector."""
    w = model.w if isinstance(model, Model) else np.asarray(model, dtype=np.float64)
    if x.d != w.size:
        raise DimensionMismatch(f"instance has d={x.d}, model has d={w.size}")
    return float(np.dot(w[x.indices], x.values))


def score_matrix(w, X: FeatureMatrix) -> np.ndarray:
    w = np.asarray(w, dtype=np.float64)
    if X.d != w.size:
        raise DimensionMismatch(f"data has d={X.d}, model has d={w.size}")
    return np.asarray(X.csr @ w).ravel()
