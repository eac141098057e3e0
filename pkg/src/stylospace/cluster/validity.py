"""Cluster validity battery: purity against author labels, the
Davies-Bouldin index, seeded random baselines, and pairwise-author
comparisons.

Outliers (label -1) are excluded from purity and DBI throughout: including
them as one mega-cluster would dominate both metrics, and most corpus
points end up as outliers under density clustering.
"""

from __future__ import annotations

from collections import Counter
from dataclasses import dataclass
from itertools import combinations

import numpy as np

from .hdbscan import ClusterParams, fit_hdbscan

__all__ = [
    "ValidityReport",
    "PairReport",
    "purity",
    "davies_bouldin",
    "random_baseline",
    "baseline_dbi",
    "validity_report",
    "authorship_pair_report",
    "all_pair_reports",
    "sweep",
]


@dataclass
class ValidityReport:
    purity: float
    dbi: float | None
    baseline_purity: float
    n_clustered: int
    n_outliers: int


@dataclass
class PairReport:
    author_a: str
    author_b: str
    n_points: int
    purity: float
    dbi: float | None
    baseline_purity: float
    baseline_dbi: float | None
    purity_improve: float
    dbi_improve: float | None


def purity(labels, classes) -> float:
    """Fraction of non-outlier points in their cluster's majority class."""
    labels = np.asarray(labels)
    classes = np.asarray(classes)
    if len(labels) != len(classes):
        raise ValueError("labels and classes must have equal length")
    mask = labels >= 0
    if not mask.any():
        raise ValueError("purity undefined: all points are outliers")
    total = 0
    for lab in np.unique(labels[mask]):
        counts = Counter(classes[labels == lab].tolist())
        total += max(counts.values())
    return total / int(mask.sum())


def davies_bouldin(vectors, labels) -> float:
    """Standard DBI over non-outlier points; lower is better.

    s_i is the mean Euclidean distance of members to their centroid and the
    index averages, per cluster, the worst (s_i + s_j) / d(c_i, c_j).
    """
    X = np.asarray(vectors, dtype=np.float64)
    labels = np.asarray(labels)
    keep = sorted(int(v) for v in np.unique(labels) if v >= 0)
    if len(keep) < 2:
        raise ValueError("DBI needs at least 2 non-outlier clusters")
    centroids = []
    spreads = []
    for lab in keep:
        pts = X[labels == lab]
        c = pts.mean(axis=0)
        centroids.append(c)
        spreads.append(float(np.sqrt(((pts - c) ** 2).sum(axis=1)).mean()))
    centroids = np.asarray(centroids)
    k = len(keep)
    gaps = np.sqrt(((centroids[:, None, :] - centroids[None, :, :]) ** 2).sum(axis=2))
    off = gaps[~np.eye(k, dtype=bool)]
    if off.min() == 0.0:
        raise ValueError("degenerate centroids: two clusters share a centroid")
    total = 0.0
    for i in range(k):
        total += max(
            (spreads[i] + spreads[j]) / gaps[i, j] for j in range(k) if j != i
        )
    return total / k


def random_baseline(labels, classes, repeats: int = 20, seed: int = 0) -> float:
    """Mean purity over seeded permutations of the label vector (cluster
    sizes preserved)."""
    if repeats < 1:
        raise ValueError("repeats must be >= 1")
    labels = np.asarray(labels)
    rng = np.random.default_rng(seed)
    values = []
    for _ in range(repeats):
        perm = rng.permutation(len(labels))
        values.append(purity(labels[perm], classes))
    return float(np.mean(values))


def baseline_dbi(vectors, labels, repeats: int = 20, seed: int = 0) -> float | None:
    """Mean DBI over seeded permutations of the label vector; permutations
    with coincident centroids are skipped.  None when every permutation is
    degenerate."""
    if repeats < 1:
        raise ValueError("repeats must be >= 1")
    labels = np.asarray(labels)
    rng = np.random.default_rng(seed)
    values = []
    for _ in range(repeats):
        perm = rng.permutation(len(labels))
        try:
            values.append(davies_bouldin(vectors, labels[perm]))
        except ValueError:
            continue
    return float(np.mean(values)) if values else None


def validity_report(
    vectors, labels, classes, repeats: int = 20, seed: int = 0
) -> ValidityReport:
    labels = np.asarray(labels)
    n_out = int((labels < 0).sum())
    try:
        dbi = davies_bouldin(vectors, labels)
    except ValueError:
        dbi = None
    return ValidityReport(
        purity=purity(labels, classes),
        dbi=dbi,
        baseline_purity=random_baseline(labels, classes, repeats, seed),
        n_clustered=len(labels) - n_out,
        n_outliers=n_out,
    )


def authorship_pair_report(
    vectors, labels, authors, pair: tuple[str, str], repeats: int = 20, seed: int = 0
) -> PairReport:
    """Validity restricted to two authors' points; improvements are against
    the seeded label-permutation baselines."""
    labels = np.asarray(labels)
    authors = np.asarray(authors)
    X = np.asarray(vectors, dtype=np.float64)
    a, b = pair
    clustered = labels >= 0
    for author in (a, b):
        if not ((authors == author) & clustered).any():
            raise ValueError(f"author {author!r} has no non-outlier points")
    mask = (authors == a) | (authors == b)
    sub_labels = labels[mask]
    sub_authors = authors[mask]
    sub_X = X[mask]

    p = purity(sub_labels, sub_authors)
    base_p = random_baseline(sub_labels, sub_authors, repeats, seed)
    try:
        d = davies_bouldin(sub_X, sub_labels)
    except ValueError:
        d = None
    base_d = baseline_dbi(sub_X, sub_labels, repeats, seed) if d is not None else None
    return PairReport(
        author_a=a,
        author_b=b,
        n_points=int(mask.sum()),
        purity=p,
        dbi=d,
        baseline_purity=base_p,
        baseline_dbi=base_d,
        purity_improve=p - base_p,
        dbi_improve=(base_d - d) if (d is not None and base_d is not None) else None,
    )


def all_pair_reports(
    vectors, labels, authors, repeats: int = 20, seed: int = 0, min_points: int = 2
) -> list[PairReport]:
    """Pair reports for every author pair with non-outlier points, sorted
    by purity improvement (descending)."""
    labels = np.asarray(labels)
    authors = np.asarray(authors)
    present = sorted(set(authors[labels >= 0].tolist()))
    out = []
    for a, b in combinations(present, 2):
        mask = (authors == a) | (authors == b)
        if int(mask.sum()) < min_points:
            continue
        out.append(authorship_pair_report(vectors, labels, authors, (a, b), repeats, seed))
    out.sort(key=lambda r: (-r.purity_improve, r.author_a, r.author_b))
    return out


@dataclass
class SweepRow:
    params: ClusterParams
    n_clusters: int
    n_outliers: int
    purity: float | None
    dbi: float | None
    baseline_purity: float | None


def sweep(
    vectors,
    grid: list[ClusterParams],
    classes=None,
    repeats: int = 20,
    seed: int = 0,
) -> list[SweepRow]:
    """Fit each parameter combination and report the validity columns."""
    rows = []
    X = np.asarray(vectors, dtype=np.float64)
    for params in grid:
        model = fit_hdbscan(X, params)
        labels = model.labels
        n_out = int((labels < 0).sum())
        p = base = None
        if classes is not None and (labels >= 0).any():
            p = purity(labels, classes)
            base = random_baseline(labels, classes, repeats, seed)
        try:
            dbi = davies_bouldin(X, labels)
        except ValueError:
            dbi = None
        rows.append(
            SweepRow(
                params=params,
                n_clusters=model.n_clusters,
                n_outliers=n_out,
                purity=p,
                dbi=dbi,
                baseline_purity=base,
            )
        )
    return rows
