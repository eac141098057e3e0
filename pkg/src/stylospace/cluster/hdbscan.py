"""Hierarchical density clustering over style vectors, from scratch.

Pipeline: optional per-dimension z-scoring, core distances (distance to the
min_samples-th nearest other point), mutual reachability
max(core_a, core_b, d), a Prim MST, single linkage over ascending MST
edges, a condensed tree in which branches smaller than min_cluster_size are
point-fallout events, excess-of-mass cluster selection on stability
sum(1/eps_leave - 1/eps_birth), an epsilon override that refuses splits
below cluster_selection_epsilon, and labeling with outliers as -1.

Everything is deterministic given input order; distance ties break toward
the lower point index.  Zero distances are legal throughout (duplicate
points collapse into one cluster); nothing divides by a distance except
the guarded lambda transform.

The O(n^2) distance work lives in ``_kernels`` (compiled when available,
pure Python otherwise; both bit-identical).
"""

from __future__ import annotations

import json
import math
from collections import deque
from dataclasses import dataclass, field

import numpy as np

from . import _kernels

__all__ = [
    "ClusterParams",
    "ClusterModel",
    "fit_hdbscan",
    "predict",
    "single_linkage_merges",
]

_INF = math.inf


@dataclass(frozen=True)
class ClusterParams:
    min_cluster_size: int = 10
    min_samples: int = 5
    cluster_selection_epsilon: float = 0.0
    standardize: bool = True

    def validate(self) -> None:
        if self.min_cluster_size < 2:
            raise ValueError("min_cluster_size must be >= 2")
        if self.min_samples < 1:
            raise ValueError("min_samples must be >= 1")
        if not math.isfinite(self.cluster_selection_epsilon) or self.cluster_selection_epsilon < 0:
            raise ValueError("cluster_selection_epsilon must be a finite non-negative real")


@dataclass
class ClusterModel:
    params: ClusterParams
    labels: np.ndarray
    n_clusters: int
    exemplars: dict[int, list]
    feature_mean: np.ndarray
    feature_scale: np.ndarray
    ids: list = field(default_factory=list)
    exemplar_vectors: dict[int, np.ndarray] = field(default_factory=dict)
    exemplar_cores: dict[int, np.ndarray] = field(default_factory=dict)
    cluster_radius: dict[int, float] = field(default_factory=dict)

    def to_json_obj(self) -> dict:
        return {
            "params": {
                "min_cluster_size": self.params.min_cluster_size,
                "min_samples": self.params.min_samples,
                "cluster_selection_epsilon": self.params.cluster_selection_epsilon,
                "standardize": self.params.standardize,
            },
            "feature_stats": {
                "mean": self.feature_mean.tolist(),
                "scale": self.feature_scale.tolist(),
            },
            "n_clusters": self.n_clusters,
            "labels": self.labels.tolist(),
            "ids": list(self.ids),
            "exemplars": {str(k): list(v) for k, v in self.exemplars.items()},
            "exemplar_vectors": {
                str(k): np.asarray(v).tolist() for k, v in self.exemplar_vectors.items()
            },
            "exemplar_cores": {
                str(k): np.asarray(v).tolist() for k, v in self.exemplar_cores.items()
            },
            "cluster_radius": {str(k): v for k, v in self.cluster_radius.items()},
        }

    def to_json(self) -> str:
        return json.dumps(self.to_json_obj(), sort_keys=True)

    @classmethod
    def from_json_obj(cls, obj: dict) -> "ClusterModel":
        params = ClusterParams(**obj["params"])
        return cls(
            params=params,
            labels=np.asarray(obj["labels"], dtype=np.intp),
            n_clusters=int(obj["n_clusters"]),
            exemplars={int(k): list(v) for k, v in obj["exemplars"].items()},
            feature_mean=np.asarray(obj["feature_stats"]["mean"], dtype=np.float64),
            feature_scale=np.asarray(obj["feature_stats"]["scale"], dtype=np.float64),
            ids=list(obj.get("ids", [])),
            exemplar_vectors={
                int(k): np.asarray(v, dtype=np.float64)
                for k, v in obj["exemplar_vectors"].items()
            },
            exemplar_cores={
                int(k): np.asarray(v, dtype=np.float64)
                for k, v in obj["exemplar_cores"].items()
            },
            cluster_radius={int(k): float(v) for k, v in obj["cluster_radius"].items()},
        )


def _lam(eps: float) -> float:
    return _INF if eps <= 0.0 else 1.0 / eps


def _stability_term(leave: float, birth: float) -> float:
    if leave == _INF and birth == _INF:
        return 0.0
    return leave - birth


def _prepare(vectors, params: ClusterParams):
    X = np.ascontiguousarray(vectors, dtype=np.float64)
    if X.ndim != 2:
        raise ValueError("feature matrix must be 2-dimensional")
    if X.shape[0] < 2:
        raise ValueError("need at least 2 points")
    if not np.isfinite(X).all():
        raise ValueError("feature matrix contains NaN or infinity")
    if params.standardize:
        mean = X.mean(axis=0)
        std = X.std(axis=0)
        scale = np.where(std > 0, std, 1.0)
        Xs = (X - mean) / scale
    else:
        mean = np.zeros(X.shape[1])
        scale = np.ones(X.shape[1])
        Xs = X
    return X, np.ascontiguousarray(Xs), mean, scale


def single_linkage_merges(Xs: np.ndarray, min_samples: int):
    """Core distances plus the single-linkage merge list over mutual
    reachability.  Merges are (left, right, height, size) with node ids
    0..n-1 for points and n.. for merge nodes, in ascending edge order
    (ties by lower endpoint indices)."""
    n = len(Xs)
    cores = _kernels.core_distances(Xs, min_samples)
    us, vs, ws = _kernels.mst_edges(Xs, cores)
    a = np.minimum(us, vs)
    b = np.maximum(us, vs)
    order = np.lexsort((b, a, ws))

    parent = list(range(2 * n - 1))

    def find(x: int) -> int:
        root = x
        while parent[root] != root:
            root = parent[root]
        while parent[x] != root:
            parent[x], x = root, parent[x]
        return root

    sizes = [1] * n
    merges: list[tuple[int, int, float, int]] = []
    for idx in order:
        ra, rb = find(int(us[idx])), find(int(vs[idx]))
        nid = n + len(merges)
        size = sizes[ra] + sizes[rb]
        sizes.append(size)
        merges.append((ra, rb, float(ws[idx]), size))
        parent[ra] = parent[rb] = nid
    return cores, merges


class _CondensedTree:
    """Condensed hierarchy: clusters with birth epsilons, point fallout
    rows, and true-split records."""

    def __init__(self, n: int, mcs: int, merges):
        self.n = n
        self.parent: list[int] = []
        self.children: list[list[int]] = []
        self.birth_eps: list[float] = []
        self.point_rows: list[list[tuple[int, float]]] = []
        self.split: list[tuple[float, int] | None] = []
        if n == 0 or not merges:
            return
        node_children = {}
        node_height = {}
        node_size = {}
        for i, (left, right, height, size) in enumerate(merges):
            nid = n + i
            node_children[nid] = (left, right)
            node_height[nid] = height
            node_size[nid] = size

        def size_of(node: int) -> int:
            return 1 if node < n else node_size[node]

        def leaves_of(node: int):
            stack = [node]
            out = []
            while stack:
                cur = stack.pop()
                if cur < n:
                    out.append(cur)
                else:
                    l, r = node_children[cur]
                    stack.append(r)
                    stack.append(l)
            return out

        def new_cluster(parent: int, birth: float) -> int:
            cid = len(self.parent)
            self.parent.append(parent)
            self.children.append([])
            self.birth_eps.append(birth)
            self.point_rows.append([])
            self.split.append(None)
            if parent >= 0:
                self.children[parent].append(cid)
            return cid

        root_node = n + len(merges) - 1
        root_cid = new_cluster(-1, _INF)
        queue = deque([(root_node, root_cid)])
        while queue:
            cur, cid = queue.popleft()
            while True:
                left, right = node_children[cur]
                sl, sr = size_of(left), size_of(right)
                lam = _lam(node_height[cur])
                if sl >= mcs and sr >= mcs:
                    self.split[cid] = (lam, sl + sr)
                    cl = new_cluster(cid, node_height[cur])
                    cr = new_cluster(cid, node_height[cur])
                    queue.append((left, cl))
                    queue.append((right, cr))
                    break
                if sl >= mcs:
                    for p in leaves_of(right):
                        self.point_rows[cid].append((p, lam))
                    cur = left
                elif sr >= mcs:
                    for p in leaves_of(left):
                        self.point_rows[cid].append((p, lam))
                    cur = right
                else:
                    for p in leaves_of(left):
                        self.point_rows[cid].append((p, lam))
                    for p in leaves_of(right):
                        self.point_rows[cid].append((p, lam))
                    break

    def __len__(self) -> int:
        return len(self.parent)

    def stability(self, cid: int) -> float:
        birth = _lam(self.birth_eps[cid])
        total = 0.0
        for _, lam in self.point_rows[cid]:
            total += _stability_term(lam, birth)
        if self.split[cid] is not None:
            lam, size = self.split[cid]
            total += size * _stability_term(lam, birth)
        return total

    def subtree_point_rows(self, cid: int):
        out = []
        stack = [cid]
        while stack:
            cur = stack.pop()
            out.extend(self.point_rows[cur])
            stack.extend(reversed(self.children[cur]))
        return out


def _select_clusters(tree: _CondensedTree, epsilon: float) -> list[int]:
    """Excess-of-mass selection plus the epsilon override; returns the
    selected cluster ids in ascending (BFS) order."""
    ncl = len(tree)
    if ncl == 0:
        return []
    stability = [tree.stability(cid) for cid in range(ncl)]
    eff = [0.0] * ncl
    chosen = [False] * ncl
    for cid in range(ncl - 1, -1, -1):
        child_sum = sum(eff[ch] for ch in tree.children[cid])
        if stability[cid] > child_sum:
            chosen[cid] = True
            eff[cid] = stability[cid]
        else:
            eff[cid] = child_sum

    def antichain(flags: list[bool]) -> list[int]:
        covered = [False] * ncl
        kept = [False] * ncl
        out = []
        for cid in range(ncl):
            par = tree.parent[cid]
            above = par >= 0 and (covered[par] or kept[par])
            covered[cid] = above
            if flags[cid] and not above:
                kept[cid] = True
                out.append(cid)
        return out

    selected = antichain(chosen)
    if epsilon > 0.0:
        lifted = set()
        for cid in selected:
            cur = cid
            while tree.birth_eps[cur] < epsilon and tree.parent[cur] >= 0:
                cur = tree.parent[cur]
            lifted.add(cur)
        flags = [cid in lifted for cid in range(ncl)]
        selected = antichain(flags)
    return selected


def fit_hdbscan(vectors, params: ClusterParams, ids=None) -> ClusterModel:
    """Fit the density hierarchy and label points; outliers get -1.

    A corpus smaller than min_cluster_size is all outliers (a valid result,
    not an error); NaN or infinite inputs are errors.
    """
    params.validate()
    X, Xs, mean, scale = _prepare(vectors, params)
    n = len(X)
    if ids is None:
        ids = list(range(n))
    elif len(ids) != n:
        raise ValueError("ids length does not match vector count")

    labels = np.full(n, -1, dtype=np.intp)
    model = ClusterModel(
        params=params,
        labels=labels,
        n_clusters=0,
        exemplars={},
        feature_mean=mean,
        feature_scale=scale,
        ids=list(ids),
    )
    if n < params.min_cluster_size:
        return model

    cores, merges = single_linkage_merges(Xs, params.min_samples)
    tree = _CondensedTree(n, params.min_cluster_size, merges)
    selected = _select_clusters(tree, params.cluster_selection_epsilon)
    label_of_cid = {cid: i for i, cid in enumerate(selected)}

    point_cid = {}
    for cid in range(len(tree)):
        for p, _ in tree.point_rows[cid]:
            point_cid[p] = cid

    resolve_cache: dict[int, int] = {}

    def resolve(cid: int) -> int:
        seen = []
        cur = cid
        while cur not in resolve_cache:
            if cur in label_of_cid:
                resolve_cache[cur] = label_of_cid[cur]
                break
            if tree.parent[cur] < 0:
                resolve_cache[cur] = -1
                break
            seen.append(cur)
            cur = tree.parent[cur]
        result = resolve_cache[cur]
        for c in seen:
            resolve_cache[c] = result
        return result

    for p, cid in point_cid.items():
        labels[p] = resolve(cid)

    model.n_clusters = len(selected)
    for cid in selected:
        label = label_of_cid[cid]
        rows = tree.subtree_point_rows(cid)
        top = max(lam for _, lam in rows)
        points = sorted(p for p, lam in rows if lam == top)
        model.exemplars[label] = [ids[p] for p in points]
        model.exemplar_vectors[label] = X[points].copy()
        model.exemplar_cores[label] = cores[points].copy()
        members = np.flatnonzero(labels == label)
        model.cluster_radius[label] = float(cores[members].max()) if len(members) else 0.0
    return model


def predict(model: ClusterModel, vector) -> int:
    """Label of the nearest exemplar by mutual reachability, or -1 when the
    probe is farther than every cluster's maximum internal core distance."""
    v = np.asarray(vector, dtype=np.float64).ravel()
    if v.shape[0] != model.feature_mean.shape[0]:
        raise ValueError(
            f"dimension mismatch: model has {model.feature_mean.shape[0]}, got {v.shape[0]}"
        )
    z = (v - model.feature_mean) / model.feature_scale
    best_label = -1
    best_dmr = _INF
    for label in sorted(model.exemplar_vectors):
        radius = model.cluster_radius.get(label, 0.0)
        evecs = (model.exemplar_vectors[label] - model.feature_mean) / model.feature_scale
        cores = model.exemplar_cores[label]
        for evec, core in zip(evecs, cores):
            d = float(np.sqrt(((z - evec) ** 2).sum()))
            dmr = max(float(core), d)
            if dmr <= radius and dmr < best_dmr:
                best_dmr = dmr
                best_label = label
    return best_label
