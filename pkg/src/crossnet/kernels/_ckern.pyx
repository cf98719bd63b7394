# cython: language_level=3
"""Compiled graph kernels; see pykern.py for the reference semantics.

Both kernels must match the pure versions bit for bit: the Dijkstra heap
orders entries by (distance, node id), and candidate pairs are emitted in
(i, j) ascending order.
"""

import numpy as np

cimport numpy as cnp

cnp.import_array()

BACKEND = "compiled"

ctypedef cnp.int64_t i64
ctypedef cnp.float64_t f64


cdef inline void _heap_push(f64* hk, i64* hv, Py_ssize_t* size,
                            f64 key, i64 val) noexcept:
    cdef Py_ssize_t pos = size[0]
    cdef Py_ssize_t parent
    size[0] += 1
    while pos > 0:
        parent = (pos - 1) >> 1
        if hk[parent] < key or (hk[parent] == key and hv[parent] <= val):
            break
        hk[pos] = hk[parent]
        hv[pos] = hv[parent]
        pos = parent
    hk[pos] = key
    hv[pos] = val


cdef inline i64 _heap_pop(f64* hk, i64* hv, Py_ssize_t* size,
                          f64* key_out) noexcept:
    cdef f64 root_key = hk[0]
    cdef i64 root_val = hv[0]
    cdef Py_ssize_t last = size[0] - 1
    cdef f64 key = hk[last]
    cdef i64 val = hv[last]
    cdef Py_ssize_t pos = 0
    cdef Py_ssize_t child
    size[0] = last
    if last > 0:
        while True:
            child = 2 * pos + 1
            if child >= last:
                break
            if child + 1 < last and (hk[child + 1] < hk[child] or
                    (hk[child + 1] == hk[child] and hv[child + 1] < hv[child])):
                child += 1
            if key < hk[child] or (key == hk[child] and val <= hv[child]):
                break
            hk[pos] = hk[child]
            hv[pos] = hv[child]
            pos = child
        hk[pos] = key
        hv[pos] = val
    key_out[0] = root_key
    return root_val


def dijkstra_lengths(i64[::1] indptr, i64[::1] indices,
                     f64[::1] lengths, Py_ssize_t source):
    """CSR single-source shortest paths; unreachable -> +inf."""
    cdef Py_ssize_t n = indptr.shape[0] - 1
    cdef Py_ssize_t m = indices.shape[0]
    dist_arr = np.full(n, np.inf, dtype=np.float64)
    cdef f64[::1] dist = dist_arr
    done_arr = np.zeros(n, dtype=np.uint8)
    cdef cnp.uint8_t[::1] done = done_arr
    hk_arr = np.empty(m + 1, dtype=np.float64)
    hv_arr = np.empty(m + 1, dtype=np.int64)
    cdef f64[::1] hk = hk_arr
    cdef i64[::1] hv = hv_arr
    cdef Py_ssize_t size = 0
    cdef f64 d, nd
    cdef i64 u, v
    cdef Py_ssize_t e

    dist[source] = 0.0
    _heap_push(&hk[0], &hv[0], &size, 0.0, source)
    while size > 0:
        u = _heap_pop(&hk[0], &hv[0], &size, &d)
        if done[u]:
            continue
        done[u] = 1
        for e in range(indptr[u], indptr[u + 1]):
            v = indices[e]
            nd = d + lengths[e]
            if nd < dist[v]:
                dist[v] = nd
                _heap_push(&hk[0], &hv[0], &size, nd, v)
    return dist_arr


def common_neighbor_counts(i64[::1] indptr, i64[::1] indices):
    """Shared-neighbor counts for unordered pairs; see pykern for contract."""
    cdef Py_ssize_t n = indptr.shape[0] - 1
    cnt_arr = np.zeros(n, dtype=np.int64)
    touched_arr = np.empty(n, dtype=np.int64)
    cdef i64[::1] cnt = cnt_arr
    cdef i64[::1] touched = touched_arr
    cdef Py_ssize_t i, e, e2, ntouch, t, pos
    cdef i64 u, j, key
    cdef Py_ssize_t total = 0

    out_i_parts = []
    out_j_parts = []
    out_c_parts = []
    for i in range(n):
        ntouch = 0
        for e in range(indptr[i], indptr[i + 1]):
            u = indices[e]
            for e2 in range(indptr[u], indptr[u + 1]):
                j = indices[e2]
                if j > i:
                    if cnt[j] == 0:
                        touched[ntouch] = j
                        ntouch += 1
                    cnt[j] += 1
        if ntouch == 0:
            continue
        # insertion sort: candidate lists are short, keep (i, j) order pinned
        for t in range(1, ntouch):
            key = touched[t]
            pos = t
            while pos > 0 and touched[pos - 1] > key:
                touched[pos] = touched[pos - 1]
                pos -= 1
            touched[pos] = key
        ii = np.full(ntouch, i, dtype=np.int64)
        jj = np.empty(ntouch, dtype=np.int64)
        cc = np.empty(ntouch, dtype=np.int64)
        for t in range(ntouch):
            j = touched[t]
            jj[t] = j
            cc[t] = cnt[j]
            cnt[j] = 0
        out_i_parts.append(ii)
        out_j_parts.append(jj)
        out_c_parts.append(cc)
        total += ntouch

    if total == 0:
        z = np.zeros(0, dtype=np.int64)
        return z, z.copy(), z.copy()
    return (np.concatenate(out_i_parts), np.concatenate(out_j_parts),
            np.concatenate(out_c_parts))
