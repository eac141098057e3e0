# cython: boundscheck=False, wraparound=False, cdivision=True, initializedcheck=False
"""Compiled kernels for the O(n^2) clustering hot path: core distances and
the Prim minimum spanning tree over mutual reachability.

Arithmetic is scalar with left-to-right accumulation, mirroring
``stylospace.cluster._mstpure`` operation for operation, so the two backends
return bit-identical results.
"""

from libc.math cimport sqrt, INFINITY
from libc.stdlib cimport free, malloc

import numpy as np


cdef inline double _dist(const double[:, ::1] x, Py_ssize_t a, Py_ssize_t b) nogil:
    cdef double s = 0.0
    cdef double t
    cdef Py_ssize_t j
    for j in range(x.shape[1]):
        t = x[a, j] - x[b, j]
        s += t * t
    return sqrt(s)


cdef inline void _sift_down(double* h, Py_ssize_t end) nogil:
    # max-heap sift-down from the root within h[0:end]
    cdef Py_ssize_t root = 0
    cdef Py_ssize_t child
    cdef double tmp
    while True:
        child = 2 * root + 1
        if child >= end:
            break
        if child + 1 < end and h[child + 1] > h[child]:
            child += 1
        if h[child] > h[root]:
            tmp = h[root]
            h[root] = h[child]
            h[child] = tmp
            root = child
        else:
            break


cdef inline void _sift_up(double* h, Py_ssize_t pos) nogil:
    cdef Py_ssize_t parent
    cdef double tmp
    while pos > 0:
        parent = (pos - 1) // 2
        if h[pos] > h[parent]:
            tmp = h[pos]
            h[pos] = h[parent]
            h[parent] = tmp
            pos = parent
        else:
            break


def core_distances(double[:, ::1] x, Py_ssize_t k):
    """Euclidean distance of each point to its k-th nearest other point
    (k is clamped to n - 1)."""
    cdef Py_ssize_t n = x.shape[0]
    out = np.zeros(n, dtype=np.float64)
    cdef double[::1] ov = out
    cdef Py_ssize_t i, j, m
    cdef double d
    cdef Py_ssize_t kk = k if k < n - 1 else n - 1
    if kk <= 0 or n == 0:
        return out
    cdef double* heap = <double*> malloc(kk * sizeof(double))
    if heap == NULL:
        raise MemoryError
    try:
        with nogil:
            for i in range(n):
                m = 0
                for j in range(n):
                    if j == i:
                        continue
                    d = _dist(x, i, j)
                    if m < kk:
                        heap[m] = d
                        m += 1
                        _sift_up(heap, m - 1)
                    elif d < heap[0]:
                        heap[0] = d
                        _sift_down(heap, kk)
                ov[i] = heap[0]
    finally:
        free(heap)
    return out


def mst_edges(double[:, ::1] x, double[::1] cores):
    """Prim MST over mutual reachability max(core_a, core_b, d(a, b)),
    started at point 0; distance ties pick the lower point index.

    Returns (us, vs, ws): edge endpoints (us[i] already in the tree) and
    weights, in the order the tree grew.
    """
    cdef Py_ssize_t n = x.shape[0]
    us = np.empty(max(n - 1, 0), dtype=np.intp)
    vs = np.empty(max(n - 1, 0), dtype=np.intp)
    ws = np.empty(max(n - 1, 0), dtype=np.float64)
    if n < 2:
        return us, vs, ws
    cdef Py_ssize_t[::1] uv = us
    cdef Py_ssize_t[::1] vv = vs
    cdef double[::1] wv = ws
    cdef double* dist = <double*> malloc(n * sizeof(double))
    cdef Py_ssize_t* pred = <Py_ssize_t*> malloc(n * sizeof(Py_ssize_t))
    cdef unsigned char* intree = <unsigned char*> malloc(n * sizeof(unsigned char))
    if dist == NULL or pred == NULL or intree == NULL:
        free(dist)
        free(pred)
        free(intree)
        raise MemoryError
    cdef Py_ssize_t i, j, step, best, current
    cdef double d, bd
    try:
        with nogil:
            for i in range(n):
                dist[i] = INFINITY
                pred[i] = -1
                intree[i] = 0
            intree[0] = 1
            current = 0
            for step in range(n - 1):
                for j in range(n):
                    if intree[j]:
                        continue
                    d = _dist(x, current, j)
                    if cores[current] > d:
                        d = cores[current]
                    if cores[j] > d:
                        d = cores[j]
                    if d < dist[j]:
                        dist[j] = d
                        pred[j] = current
                best = -1
                bd = INFINITY
                for j in range(n):
                    if not intree[j] and dist[j] < bd:
                        bd = dist[j]
                        best = j
                if best < 0:
                    for j in range(n):
                        if not intree[j]:
                            best = j
                            break
                    bd = dist[best]
                uv[step] = pred[best]
                vv[step] = best
                wv[step] = bd
                intree[best] = 1
                current = best
    finally:
        free(dist)
        free(pred)
        free(intree)
    return us, vs, ws
