"""Pure-Python fallback for the clustering kernels.

Mirrors ``stylospace.cluster._mstcore`` operation for operation (scalar
left-to-right accumulation, same tie-breaking), so results are bit-identical
to the compiled backend; only speed differs.
"""

from __future__ import annotations

import heapq
import math

import numpy as np

INF = math.inf


def core_distances(x: np.ndarray, k: int) -> np.ndarray:
    """Euclidean distance of each point to its k-th nearest other point
    (k is clamped to n - 1)."""
    n = len(x)
    out = np.zeros(n, dtype=np.float64)
    kk = min(k, n - 1)
    if kk <= 0 or n == 0:
        return out
    rows = [tuple(map(float, row)) for row in x]
    for i in range(n):
        ri = rows[i]
        dists = []
        append = dists.append
        for j in range(n):
            if j == i:
                continue
            rj = rows[j]
            s = 0.0
            for a, b in zip(ri, rj):
                t = a - b
                s += t * t
            append(math.sqrt(s))
        out[i] = heapq.nsmallest(kk, dists)[-1]
    return out


def mst_edges(x: np.ndarray, cores: np.ndarray) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """Prim MST over mutual reachability max(core_a, core_b, d(a, b)),
    started at point 0; distance ties pick the lower point index.

    Returns (us, vs, ws): edge endpoints (us[i] already in the tree) and
    weights, in the order the tree grew.
    """
    n = len(x)
    us = np.empty(max(n - 1, 0), dtype=np.intp)
    vs = np.empty(max(n - 1, 0), dtype=np.intp)
    ws = np.empty(max(n - 1, 0), dtype=np.float64)
    if n < 2:
        return us, vs, ws
    rows = [tuple(map(float, row)) for row in x]
    core = [float(c) for c in cores]
    dist = [INF] * n
    pred = [-1] * n
    intree = [False] * n
    intree[0] = True
    current = 0
    for step in range(n - 1):
        rc = rows[current]
        cc = core[current]
        for j in range(n):
            if intree[j]:
                continue
            rj = rows[j]
            s = 0.0
            for a, b in zip(rc, rj):
                t = a - b
                s += t * t
            d = math.sqrt(s)
            if cc > d:
                d = cc
            if core[j] > d:
                d = core[j]
            if d < dist[j]:
                dist[j] = d
                pred[j] = current
        best = -1
        bd = INF
        for j in range(n):
            if not intree[j] and dist[j] < bd:
                bd = dist[j]
                best = j
        if best < 0:
            best = next(j for j in range(n) if not intree[j])
            bd = dist[best]
        us[step] = pred[best]
        vs[step] = best
        ws[step] = bd
        intree[best] = True
        current = best
    return us, vs, ws
