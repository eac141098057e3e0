import math
from itertools import permutations

import numpy as np
import pytest

from stylospace.cluster import (
    ClusterParams,
    davies_bouldin,
    fit_hdbscan,
    predict,
    purity,
    random_baseline,
    single_linkage_merges,
    sweep,
    validity_report,
)
from stylospace.cluster import _mstpure
from stylospace.cluster.hdbscan import ClusterModel, _prepare
from stylospace.cluster.validity import authorship_pair_report, baseline_dbi


def make_blobs(seed=42, per_blob=100, sigma=0.05, centers=((0, 0), (1, 0), (0, 1))):
    rng = np.random.default_rng(seed)
    points = []
    truth = []
    for b, c in enumerate(centers):
        points.append(rng.normal(loc=c, scale=sigma, size=(per_blob, len(c))))
        truth.extend([b] * per_blob)
    return np.vstack(points), np.array(truth)


def best_agreement(labels, truth):
    """Best label-permutation agreement; outliers never match."""
    labs = sorted(set(labels[labels >= 0].tolist()))
    classes = sorted(set(truth.tolist()))
    best = 0
    for perm in permutations(classes, len(labs)):
        mapping = dict(zip(labs, perm))
        hits = sum(
            1 for l, t in zip(labels, truth) if l >= 0 and mapping[l] == t
        )
        best = max(best, hits)
    return best / len(truth)


# --- exhaustive oracle -------------------------------------------------

def scalar_dist(a, b):
    s = 0.0
    for x, y in zip(a, b):
        t = x - y
        s += t * t
    return math.sqrt(s)


def level_partitions(heights, partitions):
    """Partition after the last merge of each distinct height.  Mutual
    reachability ties are common (a core distance can dominate many pairs),
    and single linkage is unique only per height level, not per merge."""
    out = {}
    for h, p in zip(heights, partitions):
        out[h] = p  # later merges at equal height overwrite
    return out


def oracle_merge_sequence(Xs, min_samples):
    """Exhaustive single linkage over mutual reachability: repeatedly merge
    the pair of clusters with the smallest cross-pair distance."""
    rows = [tuple(map(float, r)) for r in Xs]
    n = len(rows)
    kk = min(min_samples, n - 1)
    cores = []
    for i in range(n):
        ds = sorted(scalar_dist(rows[i], rows[j]) for j in range(n) if j != i)
        cores.append(ds[kk - 1] if kk >= 1 else 0.0)
    dmr = [[0.0] * n for _ in range(n)]
    for i in range(n):
        for j in range(i + 1, n):
            d = max(cores[i], cores[j], scalar_dist(rows[i], rows[j]))
            dmr[i][j] = dmr[j][i] = d
    clusters = [frozenset([i]) for i in range(n)]
    heights = []
    partitions = []
    while len(clusters) > 1:
        best = None
        for ai in range(len(clusters)):
            for bi in range(ai + 1, len(clusters)):
                d = min(dmr[p][q] for p in clusters[ai] for q in clusters[bi])
                if best is None or d < best[0]:
                    best = (d, ai, bi)
        d, ai, bi = best
        merged = clusters[ai] | clusters[bi]
        clusters = [c for k, c in enumerate(clusters) if k not in (ai, bi)]
        clusters.append(merged)
        heights.append(d)
        partitions.append(frozenset(clusters))
    return heights, partitions


def fitted_merge_sequence(Xs, min_samples):
    _, merges = single_linkage_merges(np.ascontiguousarray(Xs), min_samples)
    n = len(Xs)
    comp = {i: frozenset([i]) for i in range(n)}
    heights = []
    partitions = []
    for nid, (left, right, h, _size) in enumerate(merges, start=n):
        comp[nid] = comp.pop(left) | comp.pop(right)
        heights.append(h)
        partitions.append(frozenset(comp.values()))
    return heights, partitions


class TestHierarchyOracle:
    @pytest.mark.parametrize("n,seed", [(12, 0), (30, 1), (50, 2)])
    def test_matches_exhaustive_single_linkage(self, n, seed):
        rng = np.random.default_rng(seed)
        X = rng.normal(size=(n, 3))
        Xs = _prepare(X, ClusterParams())[1]
        oh, op = oracle_merge_sequence(Xs, 5)
        fh, fp = fitted_merge_sequence(Xs, 5)
        assert oh == fh  # exact float equality: same scalar arithmetic
        assert level_partitions(oh, op) == level_partitions(fh, fp)

    def test_blob_subset_matches_oracle(self):
        X, _ = make_blobs(per_blob=16)
        X = X[:48]
        Xs = _prepare(X, ClusterParams(min_cluster_size=10, min_samples=5))[1]
        oh, op = oracle_merge_sequence(Xs, 5)
        fh, fp = fitted_merge_sequence(Xs, 5)
        assert oh == fh
        assert level_partitions(oh, op) == level_partitions(fh, fp)


class TestFit:
    def test_three_blobs_recovered(self):
        X, truth = make_blobs()
        model = fit_hdbscan(X, ClusterParams(10, 5, 0.0))
        assert model.n_clusters == 3
        assert best_agreement(model.labels, truth) >= 0.99
        assert purity(model.labels, truth) >= 0.99
        assert random_baseline(model.labels, truth, repeats=20, seed=0) <= 0.45
        assert davies_bouldin(X, model.labels) <= 0.5

    def test_tiny_corpus_is_all_outliers(self):
        X = np.arange(10, dtype=float).reshape(5, 2)
        model = fit_hdbscan(X, ClusterParams(min_cluster_size=10, min_samples=2))
        assert (model.labels == -1).all()
        assert model.n_clusters == 0

    def test_duplicate_points_single_cluster(self):
        X = np.ones((30, 3))
        model = fit_hdbscan(X, ClusterParams(min_cluster_size=10, min_samples=5))
        assert model.n_clusters == 1
        assert (model.labels == 0).all()

    def test_nan_rejected(self):
        X = np.ones((20, 2))
        X[3, 1] = np.nan
        with pytest.raises(ValueError):
            fit_hdbscan(X, ClusterParams())

    def test_every_cluster_meets_min_size(self):
        rng = np.random.default_rng(7)
        X = rng.normal(size=(120, 4))
        for mcs in (5, 10, 25):
            model = fit_hdbscan(X, ClusterParams(mcs, 3, 0.0))
            labels = model.labels
            for lab in set(labels.tolist()):
                if lab >= 0:
                    assert (labels == lab).sum() >= mcs

    def test_permutation_invariance_up_to_renaming(self):
        X, _ = make_blobs(per_blob=40)
        params = ClusterParams(10, 5, 0.0)
        base = fit_hdbscan(X, params).labels
        rng = np.random.default_rng(3)
        perm = rng.permutation(len(X))
        permuted = fit_hdbscan(X[perm], params).labels

        def partition(labels):
            groups = {}
            for i, lab in enumerate(labels):
                groups.setdefault(lab, set()).add(i)
            noise = frozenset(groups.pop(-1, set()))
            return noise, frozenset(frozenset(g) for g in groups.values())

        base_noise, base_parts = partition(base)
        # map the permuted run's labels back into original point order
        remapped = np.empty(len(X), dtype=int)
        remapped[perm] = permuted
        got_noise, got_parts = partition(remapped)
        assert base_noise == got_noise
        assert base_parts == got_parts

    def test_epsilon_merging_is_monotone(self):
        rng = np.random.default_rng(11)
        X = np.vstack(
            [rng.normal(loc=c, scale=0.3, size=(30, 2)) for c in ((0, 0), (2, 0), (0, 2), (2, 2))]
        )
        params = [ClusterParams(8, 3, eps) for eps in (0.0, 0.2, 0.5, 1.0, 5.0)]
        counts = [fit_hdbscan(X, p).n_clusters for p in params]
        assert all(a >= b for a, b in zip(counts, counts[1:]))

    def test_backends_agree_exactly(self, monkeypatch):
        import stylospace.cluster.hdbscan as hmod

        X, _ = make_blobs(per_blob=25)
        params = ClusterParams(10, 5, 0.0)
        default = fit_hdbscan(X, params)
        monkeypatch.setattr(hmod, "_kernels", _mstpure)
        pure = fit_hdbscan(X, params)
        assert (default.labels == pure.labels).all()
        assert default.n_clusters == pure.n_clusters
        assert default.exemplars == pure.exemplars

    def test_model_json_round_trip(self):
        X, _ = make_blobs(per_blob=20)
        model = fit_hdbscan(X, ClusterParams(10, 5, 0.0), ids=[f"p{i}" for i in range(len(X))])
        back = ClusterModel.from_json_obj(__import__("json").loads(model.to_json()))
        assert (back.labels == model.labels).all()
        assert back.exemplars == model.exemplars
        assert back.params == model.params
        probe = X[7]
        assert predict(back, probe) == predict(model, probe)


@pytest.fixture(scope="module")
def blob_model():
    X, truth = make_blobs()
    return X, truth, fit_hdbscan(X, ClusterParams(10, 5, 0.0))


class TestPredict:

    def test_exemplar_maps_to_own_label(self, blob_model):
        X, _, model = blob_model
        for label, points in model.exemplars.items():
            assert predict(model, X[points[0]]) == label

    def test_distant_probe_is_outlier(self, blob_model):
        X, _, model = blob_model
        diameter = np.sqrt(((X.max(axis=0) - X.min(axis=0)) ** 2).sum())
        probe = X.max(axis=0) + 10 * diameter
        assert predict(model, probe) == -1

    def test_blob_center_probe_matches_bruteforce(self, blob_model):
        X, truth, model = blob_model
        for b in range(3):
            probe = X[truth == b].mean(axis=0)
            got = predict(model, probe)
            # independent brute-force of the same rule
            z = (probe - model.feature_mean) / model.feature_scale
            best, best_d = -1, math.inf
            for label in sorted(model.exemplar_vectors):
                evs = (model.exemplar_vectors[label] - model.feature_mean) / model.feature_scale
                for ev, core in zip(evs, model.exemplar_cores[label]):
                    dmr = max(core, float(np.linalg.norm(z - ev)))
                    if dmr <= model.cluster_radius[label] and dmr < best_d:
                        best, best_d = label, dmr
            assert got == best
            assert got >= 0
            members = np.flatnonzero(model.labels == got)
            assert set(truth[members]) == {b}

    def test_dimension_mismatch(self, blob_model):
        _, _, model = blob_model
        with pytest.raises(ValueError):
            predict(model, np.zeros(5))


class TestPurity:
    def test_hand_computed(self):
        labels = np.array([0, 0, 0, 1, 1])
        classes = np.array(["A", "A", "B", "B", "B"])
        assert purity(labels, classes) == pytest.approx(0.8, abs=1e-12)

    def test_single_author_clusters(self):
        labels = np.array([0, 0, 1, 1, 2])
        classes = np.array(["a", "a", "b", "b", "c"])
        assert purity(labels, classes) == 1.0

    def test_outliers_excluded(self):
        labels = np.array([-1, -1, 0, 0])
        classes = np.array(["a", "b", "c", "c"])
        assert purity(labels, classes) == 1.0

    def test_all_outliers_error(self):
        with pytest.raises(ValueError):
            purity(np.array([-1, -1]), np.array(["a", "b"]))

    def test_invariant_under_relabeling(self):
        labels = np.array([0, 0, 1, 1, 2, 2])
        classes = np.array(["a", "b", "b", "b", "c", "a"])
        swapped = np.array([2, 2, 0, 0, 1, 1])
        assert purity(labels, classes) == purity(swapped, classes)


class TestDaviesBouldin:
    def test_hand_computed(self):
        X = np.array([[0.0], [2.0], [10.0], [12.0]])
        labels = np.array([0, 0, 1, 1])
        assert davies_bouldin(X, labels) == pytest.approx(0.2, abs=1e-12)

    def test_monotone_in_gap(self):
        X1 = np.array([[0.0], [2.0], [10.0], [12.0]])
        X2 = np.array([[0.0], [2.0], [20.0], [22.0]])
        labels = np.array([0, 0, 1, 1])
        assert davies_bouldin(X2, labels) < davies_bouldin(X1, labels)

    def test_translation_invariant_and_scale_stable(self):
        rng = np.random.default_rng(5)
        X = rng.normal(size=(40, 3))
        labels = np.array([0] * 20 + [1] * 20)
        d0 = davies_bouldin(X, labels)
        assert davies_bouldin(X + 37.5, labels) == pytest.approx(d0, rel=1e-9)
        assert davies_bouldin(X * 4.0, labels) == pytest.approx(d0, rel=1e-9)

    def test_single_cluster_error(self):
        with pytest.raises(ValueError):
            davies_bouldin(np.zeros((4, 2)), np.array([0, 0, 0, 0]))

    def test_degenerate_centroids_error(self):
        X = np.array([[0.0, 0], [0, 0], [0, 0], [0, 0]])
        with pytest.raises(ValueError):
            davies_bouldin(X, np.array([0, 0, 1, 1]))


class TestBaselines:
    def test_single_class_is_one(self):
        labels = np.array([0, 0, 1, 1, -1])
        classes = np.array(["z"] * 5)
        assert random_baseline(labels, classes, repeats=5, seed=1) == 1.0

    def test_two_even_clusters_near_half(self):
        n = 2000
        labels = np.array([0] * (n // 2) + [1] * (n // 2))
        classes = np.array(["a"] * (n // 2) + ["b"] * (n // 2))
        base = random_baseline(labels, classes, repeats=10, seed=0)
        assert abs(base - 0.5) <= 0.05

    def test_seeded_reproducibility(self):
        rng = np.random.default_rng(0)
        labels = rng.integers(-1, 3, size=100)
        classes = rng.choice(list("abc"), size=100)
        a = random_baseline(labels, classes, repeats=7, seed=9)
        b = random_baseline(labels, classes, repeats=7, seed=9)
        assert a == b

    def test_baseline_dbi_is_high_for_random_assignment(self):
        X, _ = make_blobs(per_blob=50)
        model = fit_hdbscan(X, ClusterParams(10, 5, 0.0))
        real = davies_bouldin(X, model.labels)
        base = baseline_dbi(X, model.labels, repeats=10, seed=0)
        assert base is not None and base > real


class TestPairReports:
    def test_two_author_two_blob(self):
        X, truth = make_blobs(per_blob=60, centers=((0, 0), (3, 3)))
        authors = np.where(truth == 0, "alice", "bob")
        model = fit_hdbscan(X, ClusterParams(10, 5, 0.0))
        rep = authorship_pair_report(X, model.labels, authors, ("alice", "bob"), repeats=20, seed=0)
        assert rep.purity == 1.0
        assert rep.purity_improve > 0.4
        assert rep.dbi_improve is not None and rep.dbi_improve > 0

    def test_absent_author_error(self):
        X, truth = make_blobs(per_blob=30)
        authors = np.array(["a"] * 90)
        model = fit_hdbscan(X, ClusterParams(10, 5, 0.0))
        with pytest.raises(ValueError, match="ghost"):
            authorship_pair_report(X, model.labels, authors, ("a", "ghost"))


class TestSweepAndReport:
    def test_sweep_rows(self):
        X, truth = make_blobs(per_blob=40)
        grid = [ClusterParams(10, 5, 0.0), ClusterParams(60, 5, 0.0)]
        rows = sweep(X, grid, classes=truth, repeats=5, seed=0)
        assert len(rows) == 2
        assert rows[0].n_clusters == 3
        assert rows[1].n_clusters <= rows[0].n_clusters

    def test_validity_report_counts(self):
        X, truth = make_blobs(per_blob=40)
        model = fit_hdbscan(X, ClusterParams(10, 5, 0.0))
        rep = validity_report(X, model.labels, truth, repeats=5, seed=0)
        assert rep.n_clustered + rep.n_outliers == len(X)
        assert 0 <= rep.purity <= 1
        assert rep.baseline_purity <= rep.purity
