"""Classical classifiers that predict cluster labels from style vectors.

The point of these is cluster predictability: if simple models can map the
same features onto the discovered labels, the clusters carry signal.  Four
kinds are implemented from scratch: a CART decision tree (Gini impurity,
midpoint thresholds), a random forest (bagging plus per-split feature
subsampling over a canonical row order, so training is invariant to sample
order given a seed), Gaussian naive Bayes with a variance floor, and
multinomial logistic regression trained by full-batch gradient descent on
standardized features.

Everything is deterministic given the spec seed.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

__all__ = [
    "ClassifierSpec",
    "ClassificationReport",
    "CLASSIFIER_KINDS",
    "DecisionTree",
    "RandomForest",
    "GaussianNB",
    "LogisticRegression",
    "train",
    "evaluate",
    "stratified_split",
]

CLASSIFIER_KINDS = (
    "decision_tree",
    "random_forest",
    "gaussian_nb",
    "logistic_regression",
)


@dataclass(frozen=True)
class ClassifierSpec:
    kind: str
    hyperparams: dict = field(default_factory=dict)
    seed: int = 0


@dataclass
class ClassificationReport:
    accuracy: float
    precision: float
    recall: float
    f1: float
    per_class: dict

    @property
    def support_total(self) -> int:
        return sum(v["support"] for v in self.per_class.values())


def _as_matrix(features) -> np.ndarray:
    X = np.asarray(features, dtype=np.float64)
    if X.ndim != 2:
        raise ValueError("feature matrix must be 2-dimensional")
    return X


def _check_classes(y) -> np.ndarray:
    y = np.asarray(y)
    if len(np.unique(y)) < 2:
        raise ValueError("need at least 2 classes to train a classifier")
    return y


class _TreeNode:
    __slots__ = ("feature", "threshold", "left", "right", "label")

    def __init__(self, label=None, feature=None, threshold=None, left=None, right=None):
        self.label = label
        self.feature = feature
        self.threshold = threshold
        self.left = left
        self.right = right


def _gini_for_splits(sorted_y: np.ndarray, n_classes: int):
    """Weighted Gini impurity for every split position of a sorted column.

    Position i puts rows [0..i] left and the rest right; returns an array of
    length n-1."""
    n = len(sorted_y)
    onehot = np.zeros((n, n_classes))
    onehot[np.arange(n), sorted_y] = 1.0
    left = np.cumsum(onehot, axis=0)[:-1]
    total = left[-1] + onehot[-1]
    right = total - left
    nl = np.arange(1, n, dtype=np.float64)
    nr = n - nl
    gini_l = 1.0 - ((left / nl[:, None]) ** 2).sum(axis=1)
    gini_r = 1.0 - ((right / nr[:, None]) ** 2).sum(axis=1)
    return (nl * gini_l + nr * gini_r) / n


class DecisionTree:
    """CART with Gini impurity; the best split scans all candidate features
    and the midpoints between consecutive distinct values.  Ties keep the
    first candidate (lowest feature, lowest threshold)."""

    def __init__(self, max_depth: int | None = None, feature_subsample: int | None = None,
                 rng: np.random.Generator | None = None):
        self.max_depth = max_depth
        self.feature_subsample = feature_subsample
        self.rng = rng
        self.classes_: np.ndarray | None = None
        self._root: _TreeNode | None = None

    def fit(self, X, y) -> "DecisionTree":
        X = _as_matrix(X)
        y = np.asarray(y)
        self.classes_ = np.unique(y)
        y_enc = np.searchsorted(self.classes_, y)
        self._root = self._build(X, y_enc, depth=0)
        return self

    def _candidate_features(self, d: int) -> np.ndarray:
        m = self.feature_subsample
        if m is None or m >= d or self.rng is None:
            return np.arange(d)
        return np.sort(self.rng.choice(d, size=m, replace=False))

    def _build(self, X, y_enc, depth) -> _TreeNode:
        counts = np.bincount(y_enc, minlength=len(self.classes_))
        majority = int(np.argmax(counts))
        if counts[majority] == len(y_enc):
            return _TreeNode(label=majority)
        if self.max_depth is not None and depth >= self.max_depth:
            return _TreeNode(label=majority)

        best = None  # (score, feature, threshold, mask)
        k = len(self.classes_)
        for f in self._candidate_features(X.shape[1]):
            col = X[:, f]
            order = np.argsort(col, kind="stable")
            sv = col[order]
            scores = _gini_for_splits(y_enc[order], k)
            valid = sv[:-1] < sv[1:]
            if not valid.any():
                continue
            idx = np.flatnonzero(valid)
            pos = idx[np.argmin(scores[idx])]
            score = scores[pos]
            if best is None or score < best[0]:
                thr = (sv[pos] + sv[pos + 1]) / 2.0
                best = (score, int(f), float(thr))
        if best is None:
            return _TreeNode(label=majority)
        _, f, thr = best
        mask = X[:, f] <= thr
        return _TreeNode(
            feature=f,
            threshold=thr,
            left=self._build(X[mask], y_enc[mask], depth + 1),
            right=self._build(X[~mask], y_enc[~mask], depth + 1),
        )

    def predict(self, X) -> np.ndarray:
        X = _as_matrix(X)
        out = np.empty(len(X), dtype=self.classes_.dtype)
        for i, row in enumerate(X):
            node = self._root
            while node.label is None:
                node = node.left if row[node.feature] <= node.threshold else node.right
            out[i] = self.classes_[node.label]
        return out


class RandomForest:
    """Bagged trees with per-split feature subsampling and majority vote.

    Rows are put into a canonical lexicographic order before any index
    sampling, so a fitted forest does not depend on the order samples
    arrive in.  With bootstrap off, one tree and the full feature set, it
    degenerates to a plain decision tree.
    """

    def __init__(self, n_trees: int = 25, max_depth: int | None = None,
                 feature_subsample: int | None = None, bootstrap: bool = True,
                 seed: int = 0):
        if n_trees < 1:
            raise ValueError("n_trees must be >= 1")
        self.n_trees = n_trees
        self.max_depth = max_depth
        self.feature_subsample = feature_subsample
        self.bootstrap = bootstrap
        self.seed = seed
        self.trees_: list[DecisionTree] = []
        self.classes_: np.ndarray | None = None

    def fit(self, X, y) -> "RandomForest":
        X = _as_matrix(X)
        y = np.asarray(y)
        self.classes_ = np.unique(y)
        n, d = X.shape
        order = np.lexsort(
            (np.searchsorted(self.classes_, y),) + tuple(X[:, j] for j in range(d - 1, -1, -1))
        )
        Xc, yc = X[order], y[order]
        m = self.feature_subsample
        if m is None:
            m = max(1, int(round(np.sqrt(d))))
        self.trees_ = []
        for child in np.random.SeedSequence(self.seed).spawn(self.n_trees):
            rng = np.random.default_rng(child)
            idx = rng.integers(0, n, size=n) if self.bootstrap else np.arange(n)
            tree = DecisionTree(max_depth=self.max_depth, feature_subsample=m, rng=rng)
            tree.fit(Xc[idx], yc[idx])
            self.trees_.append(tree)
        return self

    def predict(self, X) -> np.ndarray:
        X = _as_matrix(X)
        votes = np.zeros((len(X), len(self.classes_)), dtype=np.intp)
        for tree in self.trees_:
            pred = tree.predict(X)
            votes[np.arange(len(X)), np.searchsorted(self.classes_, pred)] += 1
        return self.classes_[np.argmax(votes, axis=1)]


class GaussianNB:
    """Per-class per-feature Gaussian likelihoods with a variance floor."""

    def __init__(self, var_floor: float = 1e-9):
        self.var_floor = var_floor
        self.classes_: np.ndarray | None = None

    def fit(self, X, y) -> "GaussianNB":
        X = _as_matrix(X)
        y = np.asarray(y)
        self.classes_ = np.unique(y)
        self.theta_ = np.array([X[y == c].mean(axis=0) for c in self.classes_])
        self.var_ = np.maximum(
            np.array([X[y == c].var(axis=0) for c in self.classes_]), self.var_floor
        )
        self.log_prior_ = np.log(
            np.array([(y == c).sum() for c in self.classes_]) / len(y)
        )
        return self

    def predict(self, X) -> np.ndarray:
        X = _as_matrix(X)
        joint = []
        for k in range(len(self.classes_)):
            ll = -0.5 * (
                np.log(2.0 * np.pi * self.var_[k])
                + (X - self.theta_[k]) ** 2 / self.var_[k]
            ).sum(axis=1)
            joint.append(self.log_prior_[k] + ll)
        return self.classes_[np.argmax(np.vstack(joint), axis=0)]


class LogisticRegression:
    """Multinomial softmax by full-batch gradient descent on standardized
    features, with light L2 regularization to avoid degenerate fits."""

    def __init__(self, learning_rate: float = 0.1, epochs: int = 300, l2: float = 1e-4):
        self.learning_rate = learning_rate
        self.epochs = epochs
        self.l2 = l2
        self.classes_: np.ndarray | None = None

    def fit(self, X, y) -> "LogisticRegression":
        X = _as_matrix(X)
        y = np.asarray(y)
        self.classes_ = np.unique(y)
        y_enc = np.searchsorted(self.classes_, y)
        self._mean = X.mean(axis=0)
        std = X.std(axis=0)
        self._scale = np.where(std > 0, std, 1.0)
        Z = (X - self._mean) / self._scale
        n, d = Z.shape
        k = len(self.classes_)
        Zb = np.hstack([Z, np.ones((n, 1))])
        onehot = np.zeros((n, k))
        onehot[np.arange(n), y_enc] = 1.0
        self.weights_ = np.zeros((k, d + 1))
        for _ in range(self.epochs):
            logits = Zb @ self.weights_.T
            logits -= logits.max(axis=1, keepdims=True)
            p = np.exp(logits)
            p /= p.sum(axis=1, keepdims=True)
            grad = (p - onehot).T @ Zb / n
            grad[:, :-1] += self.l2 * self.weights_[:, :-1]
            self.weights_ -= self.learning_rate * grad
        return self

    def predict(self, X) -> np.ndarray:
        X = _as_matrix(X)
        Z = (X - self._mean) / self._scale
        Zb = np.hstack([Z, np.ones((len(Z), 1))])
        return self.classes_[np.argmax(Zb @ self.weights_.T, axis=1)]


def train(spec: ClassifierSpec, features, labels):
    """Build and fit the classifier described by ``spec``; single-class
    input is an error (outliers are excluded upstream)."""
    X = _as_matrix(features)
    y = _check_classes(labels)
    hp = dict(spec.hyperparams)
    if spec.kind == "decision_tree":
        clf = DecisionTree(max_depth=hp.pop("max_depth", None))
    elif spec.kind == "random_forest":
        clf = RandomForest(
            n_trees=hp.pop("n_trees", 25),
            max_depth=hp.pop("max_depth", None),
            feature_subsample=hp.pop("feature_subsample", None),
            bootstrap=hp.pop("bootstrap", True),
            seed=spec.seed,
        )
    elif spec.kind == "gaussian_nb":
        clf = GaussianNB(var_floor=hp.pop("var_floor", 1e-9))
    elif spec.kind == "logistic_regression":
        clf = LogisticRegression(
            learning_rate=hp.pop("learning_rate", 0.1),
            epochs=hp.pop("epochs", 300),
            l2=hp.pop("l2", 1e-4),
        )
    else:
        raise ValueError(f"unknown classifier kind {spec.kind!r}")
    if hp:
        raise ValueError(f"unused hyperparams for {spec.kind}: {sorted(hp)}")
    return clf.fit(X, y)


def evaluate(classifier, features, labels) -> ClassificationReport:
    """Weighted-average precision/recall/F1 and accuracy on a labeled set."""
    X = _as_matrix(features)
    y = np.asarray(labels)
    if len(X) == 0:
        raise ValueError("empty evaluation set")
    pred = classifier.predict(X)
    classes = np.unique(np.concatenate([y, pred]))
    per_class = {}
    weighted = np.zeros(3)
    for c in classes:
        tp = int(((pred == c) & (y == c)).sum())
        fp = int(((pred == c) & (y != c)).sum())
        fn = int(((pred != c) & (y == c)).sum())
        support = tp + fn
        precision = tp / (tp + fp) if tp + fp else 0.0
        recall = tp / support if support else 0.0
        f1 = 2 * precision * recall / (precision + recall) if precision + recall else 0.0
        per_class[c.item() if hasattr(c, "item") else c] = {
            "precision": precision,
            "recall": recall,
            "f1": f1,
            "support": support,
        }
        weighted += support * np.array([precision, recall, f1])
    weighted /= len(y)
    return ClassificationReport(
        accuracy=float((pred == y).mean()),
        precision=float(weighted[0]),
        recall=float(weighted[1]),
        f1=float(weighted[2]),
        per_class=per_class,
    )


def stratified_split(features, labels, test_frac: float = 0.2, seed: int = 0):
    """Seeded stratified index split; every class keeps at least one test
    point when it has at least two members."""
    y = np.asarray(labels)
    if not 0 < test_frac < 1:
        raise ValueError("test_frac must be in (0, 1)")
    rng = np.random.default_rng(seed)
    train_idx: list[int] = []
    test_idx: list[int] = []
    for c in np.unique(y):
        members = np.flatnonzero(y == c)
        members = members[rng.permutation(len(members))]
        n_test = int(round(len(members) * test_frac))
        if len(members) > 1:
            n_test = min(max(n_test, 1), len(members) - 1)
        else:
            n_test = 0
        test_idx.extend(members[:n_test].tolist())
        train_idx.extend(members[n_test:].tolist())
    return np.array(sorted(train_idx)), np.array(sorted(test_idx))
