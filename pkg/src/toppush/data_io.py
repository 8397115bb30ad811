"""Dataset ingestion, splitting, feature scaling and model serialization.

LIBSVM grammar accepted here: ``<label> (<index>:<value> )*`` per line with
1-based, strictly increasing indices; ``#`` starts a comment that runs to the
end of the line and blank lines are skipped.  Labels ``+1``/``1`` are positive,
``-1``/``0`` negative.
"""

from __future__ import annotations

import math
import os
from dataclasses import dataclass

import numpy as np
import scipy.sparse as sp

from .core import FeatureMatrix, Model, RankingDataset
from .exceptions import EmptyClass, ParseError, TopPushError, UnknownLabel
from .loss import LossKind

MODEL_SCHEMA_VERSION = 1
MODEL_MAGIC = "toppush-model"


def parse_libsvm(path, n_features: int | None = None, *, check_labels: bool = True):
    """Parse a LIBSVM file in file order.

    Returns ``(X, labels)`` with ``X`` a CSR matrix using 0-based columns and
    ``labels`` the raw float labels.
    """
    data, indices, indptr, labels = [], [], [0], []
    max_index = 0
    with open(path, encoding="utf-8") as fh:
        for lineno, raw in enumerate(fh, start=1):
            line = raw.split("#", 1)[0].strip()
            if not line:
                continue
            tokens = line.split()
            try:
                label = float(tokens[0])
            except ValueError:
                raise ParseError(f"bad label {tokens[0]!r}", lineno, path) from None
            if check_labels and label not in (1.0, -1.0, 0.0):
                raise UnknownLabel(f"label {tokens[0]!r} is not one of +1, -1, 1, 0", lineno, path)
            prev = 0
            for tok in tokens[1:]:
                idx_s, sep, val_s = tok.partition(":")
                if not sep:
                    raise ParseError(f"expected index:value, got {tok!r}", lineno, path)
                try:
                    idx = int(idx_s)
                    val = float(val_s)
                except ValueError:
                    raise ParseError(f"bad feature {tok!r}", lineno, path) from None
                if idx < 1:
                    raise ParseError(f"feature index {idx} is not 1-based", lineno, path)
                if idx <= prev:
                    raise ParseError("feature indices must be strictly increasing", lineno, path)
                if not math.isfinite(val):
                    raise ParseError(f"non-finite value in {tok!r}", lineno, path)
                prev = idx
                indices.append(idx - 1)
                data.append(val)
            max_index = max(max_index, prev)
            indptr.append(len(indices))
            labels.append(label)

    d = max_index if n_features is None else int(n_features)
    if max_index > d:
        raise ParseError(f"feature index {max_index} exceeds n_features={d}", path=path)
    X = sp.csr_matrix(
        (np.array(data, dtype=np.float64), np.array(indices, dtype=np.int64), np.array(indptr)),
        shape=(len(labels), d),
    )
    return X, np.array(labels, dtype=np.float64)


def read_libsvm(path, n_features: int | None = None) -> RankingDataset:
    """Load a labelled LIBSVM file; ``d`` is the largest index seen unless given."""
    X, y = parse_libsvm(path, n_features)
    pos = y > 0
    data = RankingDataset(FeatureMatrix(X[pos]), FeatureMatrix(X[~pos]), source=str(path))
    data.require_both_classes(str(path))
    return data


def _format_row(label: str, X: sp.csr_matrix, i: int) -> str:
    lo, hi = X.indptr[i], X.indptr[i + 1]
    feats = " ".join(f"{j + 1}:{v:.17g}" for j, v in zip(X.indices[lo:hi], X.data[lo:hi]))
    return f"{label} {feats}".rstrip()


def write_libsvm(data: RankingDataset, path) -> None:
    """Write positives (``+1``) then negatives (``-1``)."""
    with open(path, "w", encoding="utf-8") as fh:
        for label, mat in (("+1", data.positives.csr), ("-1", data.negatives.csr)):
            for i in range(mat.shape[0]):
                fh.write(_format_row(label, mat, i) + "\n")


@dataclass(frozen=True)
class SplitSpec:
    train_fraction: float = 2.0 / 3.0
    seed: int = 0

    def __post_init__(self):
        if not 0.0 < self.train_fraction < 1.0:
            raise ValueError("train_fraction must lie in (0, 1)")


def _train_count(count: int, fraction: float) -> int:
    if count == 0:
        return 0
    # floor, with a small allowance so e.g. 3 * (2/3) counts as 2
    k = int(math.floor(count * fraction + 1e-9))
    return min(count, max(1, k))


def stratified_split(data: RankingDataset, spec: SplitSpec | None = None):
    """Shuffle each class with a seeded RNG and cut it at ``train_fraction``.

    Every class keeps at least one training instance; the test side may come
    out empty, which surfaces as EmptyClass only when it is evaluated.
    """
    spec = spec or SplitSpec()
    data.require_both_classes()
    rng = np.random.default_rng(spec.seed)
    parts = []
    for mat in (data.positives, data.negatives):
        perm = rng.permutation(mat.count)
        k = _train_count(mat.count, spec.train_fraction)
        parts.append((mat.take(np.sort(perm[:k])), mat.take(np.sort(perm[k:]))))
    (p_tr, p_te), (n_tr, n_te) = parts
    return RankingDataset(p_tr, n_tr, data.source), RankingDataset(p_te, n_te, data.source)


def stratified_folds(data: RankingDataset, folds: int = 5, seed: int = 0):
    """Return ``[(train, validation), ...]`` for stratified k-fold CV.

    Each class is shuffled with a seeded RNG and dealt round-robin into the
    folds.  Raises EmptyClass naming the first fold whose validation part
    lacks a class.
    """
    if folds < 2:
        raise ValueError("need at least two folds")
    rng = np.random.default_rng(seed)
    assign = []
    for mat in (data.positives, data.negatives):
        fold_of = np.empty(mat.count, dtype=np.int64)
        fold_of[rng.permutation(mat.count)] = np.arange(mat.count) % folds
        assign.append(fold_of)
    out = []
    for i in range(folds):
        parts = []
        for mat, fold_of, name in zip((data.positives, data.negatives), assign,
                                      ("positive", "negative")):
            va = np.flatnonzero(fold_of == i)
            if va.size == 0:
                raise EmptyClass(f"fold {i} has no {name} instances ({name} count {mat.count} < {folds} folds)")
            parts.append((mat.take(np.flatnonzero(fold_of != i)), mat.take(va)))
        (p_tr, p_va), (n_tr, n_va) = parts
        out.append((RankingDataset(p_tr, n_tr, data.source), RankingDataset(p_va, n_va, data.source)))
    return out


def scale_to_unit_ball(data: RankingDataset):
    """Divide every row by the largest row norm when it exceeds 1.

    Returns ``(scaled, factor)``; ``factor`` is 1 when no scaling was needed.
    Pos@Top, AUC and the other rank metrics are unaffected, but the effective
    strength of ``lambda`` is not.
    """
    norms = np.concatenate([data.positives.row_norms(), data.negatives.row_norms()])
    top = float(norms.max()) if norms.size else 0.0
    if top <= 1.0:
        return data, 1.0
    return (
        RankingDataset(FeatureMatrix(data.positives.csr / top),
                       FeatureMatrix(data.negatives.csr / top), data.source),
        top,
    )


def transform_features(X, model: Model) -> sp.csr_matrix:
    """Map raw instances into the model's feature space.

    Columns past the model's dimension carry zero weight and are dropped;
    missing trailing columns are zero-padded.  The training-time unit-ball
    scale is then applied.
    """
    X = X.csr if isinstance(X, FeatureMatrix) else sp.csr_matrix(X)
    if X.shape[1] > model.d:
        X = X[:, :model.d]
    elif X.shape[1] < model.d:
        X = sp.csr_matrix(X, copy=True)
        X.resize((X.shape[0], model.d))
    if model.scale_factor != 1.0:
        X = X / model.scale_factor
    return sp.csr_matrix(X)


def predict_scores(model: Model, X) -> np.ndarray:
    return np.asarray(transform_features(X, model) @ model.w).ravel()


def write_model(model: Model, path) -> None:
    """Line-oriented text; weights stored sparsely when more than half are zero."""
    w = model.w
    nz = np.flatnonzero(w)
    sparse = nz.size * 2 < w.size
    lines = [
        f"{MODEL_MAGIC}",
        f"schema_version {MODEL_SCHEMA_VERSION}",
        f"d {w.size}",
        f"loss_kind {model.loss_kind.value}",
        f"lambda {model.lam!r}",
        f"epsilon {model.trained_epsilon!r}",
        f"iterations_used {model.iterations_used}",
        f"scale_factor {model.scale_factor!r}",
        f"storage {'sparse' if sparse else 'dense'}",
        f"nnz {nz.size}",
        "weights",
    ]
    if sparse:
        lines.extend(f"{i} {float(w[i])!r}" for i in nz)
    else:
        lines.extend(repr(float(v)) for v in w)
    tmp = f"{path}.tmp"
    with open(tmp, "w", encoding="utf-8") as fh:
        fh.write("\n".join(lines) + "\n")
    os.replace(tmp, path)


def read_model(path) -> Model:
    with open(path, encoding="utf-8") as fh:
        lines = [ln.rstrip("\n") for ln in fh]
    if not lines or lines[0].strip() != MODEL_MAGIC:
        raise ParseError("not a model file", 1, path)
    header = {}
    pos = 1
    while pos < len(lines) and lines[pos].strip() != "weights":
        key, _, val = lines[pos].partition(" ")
        header[key] = val.strip()
        pos += 1
    if pos == len(lines):
        raise ParseError("missing weights section", path=path)
    try:
        version = int(header["schema_version"])
        if version != MODEL_SCHEMA_VERSION:
            raise ParseError(f"unsupported schema_version {version}", path=path)
        d = int(header["d"])
        body = lines[pos + 1:]
        w = np.zeros(d)
        if header["storage"] == "sparse":
            for k, ln in enumerate(body):
                i, v = ln.split()
                w[int(i)] = float(v)
        else:
            if len(body) != d:
                raise ParseError(f"expected {d} dense weights, found {len(body)}", path=path)
            w[:] = [float(v) for v in body]
        return Model(
            w=w,
            lam=float(header["lambda"]),
            loss_kind=LossKind(header["loss_kind"]),
            trained_epsilon=float(header["epsilon"]),
            iterations_used=int(header["iterations_used"]),
            scale_factor=float(header["scale_factor"]),
        )
    except TopPushError:
        raise
    except (KeyError, ValueError, IndexError) as exc:
        raise ParseError(f"malformed model file ({exc})", path=path) from None
