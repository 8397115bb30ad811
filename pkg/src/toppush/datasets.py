"""Seeded synthetic ranking datasets for benchmarks and behavioral checks."""

from __future__ import annotations

import numpy as np

from .core import RankingDataset, build_dataset


def _unit(rng, d):
    u = rng.normal(size=d)
    return u / np.linalg.norm(u)


def _orthogonal_part(rng, count, u, radius):
    z = rng.normal(size=(count, u.size))
    z -= np.outer(z @ u, u)
    norms = np.linalg.norm(z, axis=1, keepdims=True)
    norms[norms == 0] = 1.0
    # uniform length in [0, radius]
    return z / norms * rng.uniform(0.0, radius, size=(count, 1))


def make_separable(m=200, n=200, d=20, margin=0.5, seed=0) -> RankingDataset:
    """Two classes split by a hidden hyperplane with a gap of ``margin``.

    Along a random unit direction ``u`` positives sit in
    ``[margin/2, margin/2 + 0.25]`` and negatives in the mirrored interval;
    the component orthogonal to ``u`` has length at most 0.6, so every row
    lies inside the unit ball when ``margin <= 1``.
    """
    if d < 2:
        raise ValueError("need d >= 2")
    rng = np.random.default_rng(seed)
    u = _unit(rng, d)
    half = margin / 2.0
    tp = rng.uniform(half, half + 0.25, size=m)
    tn = -rng.uniform(half, half + 0.25, size=n)
    Xp = np.outer(tp, u) + _orthogonal_part(rng, m, u, 0.6)
    Xn = np.outer(tn, u) + _orthogonal_part(rng, n, u, 0.6)
    return build_dataset(Xp, Xn, source=f"separable(seed={seed})")


def make_overlapping(m=200, n=200, d=20, sigma=0.3, outlier_fraction=0.05,
                     outlier_offset=3.0, seed=0) -> RankingDataset:
    """Overlapping Gaussian classes plus a small cluster of high-ranking negatives.

    Positives are centred at ``e0 + e1``, negatives at the origin, both with
    isotropic spread ``sigma``.  A fraction ``outlier_fraction`` of the
    negatives is moved ``outlier_offset`` along ``e1``: they barely move the
    class means but land at the top of any ranking that leans on ``e1``, such
    as the mean-difference direction.  Rows are scaled into the unit ball.
    """
    if d < 2:
        raise ValueError("need d >= 2")
    rng = np.random.default_rng(seed)
    Xp = rng.normal(scale=sigma, size=(m, d))
    Xp[:, :2] += 1.0
    Xn = rng.normal(scale=sigma, size=(n, d))
    k = int(round(outlier_fraction * n))
    Xn[:k, 1] += outlier_offset
    scale = max(np.linalg.norm(Xp, axis=1).max(), np.linalg.norm(Xn, axis=1).max())
    return build_dataset(Xp / scale, Xn / scale, source=f"overlapping(seed={seed})")


def make_gaussian_margin(m=500, n=500, d=20, margin=0.5, seed=0) -> RankingDataset:
    """Gaussian blobs on either side of a hidden hyperplane, scaled to the unit ball.

    Used by the benchmark: the classes overlap slightly, so the solver does a
    realistic number of iterations.
    """
    rng = np.random.default_rng(seed)
    u = _unit(rng, d)
    Xp = rng.normal(size=(m, d)) + margin * u
    Xn = rng.normal(size=(n, d)) - margin * u
    scale = max(np.linalg.norm(Xp, axis=1).max(), np.linalg.norm(Xn, axis=1).max())
    return build_dataset(Xp / scale, Xn / scale, source=f"gaussian_margin(seed={seed})")


def mean_difference_direction(data: RankingDataset) -> np.ndarray:
    """Baseline scorer: difference of class means."""
    mp = np.asarray(data.positives.csr.mean(axis=0)).ravel()
    mn = np.asarray(data.negatives.csr.mean(axis=0)).ravel()
    return mp - mn
