# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True
"""Compiled hot loops: path fingerprint enumeration and the pairwise Tanimoto matrix."""

import numpy as np
cimport numpy as cnp
from libc.stdint cimport uint64_t, int32_t, uint8_t
from libc.stdlib cimport malloc, free

cnp.import_array()

cdef uint64_t FNV_OFFSET = 0xCBF29CE484222325ULL
cdef uint64_t FNV_PRIME = 0x100000001B3ULL

cdef extern from *:
    int __builtin_popcountll(unsigned long long) nogil


cdef inline uint64_t _hash_path(int32_t* seq, int length, int reverse) noexcept nogil:
    cdef uint64_t h = FNV_OFFSET
    cdef int i
    for i in range(length):
        h ^= <uint64_t>(seq[length - 1 - i] if reverse else seq[i]) & 0xFF
        h *= FNV_PRIME
    return h


cdef inline int _reverse_smaller(int32_t* seq, int length) noexcept nogil:
    # 1 if the reversed sequence sorts strictly before the forward one
    cdef int i
    for i in range(length):
        if seq[length - 1 - i] != seq[i]:
            return seq[length - 1 - i] < seq[i]
    return 0


def path_fingerprint(elements, indptr, indices, orders, int max_len, int nbits):
    cdef int32_t[::1] el = np.ascontiguousarray(elements, dtype=np.int32)
    cdef int32_t[::1] ptr = np.ascontiguousarray(indptr, dtype=np.int32)
    cdef int32_t[::1] nbr = np.ascontiguousarray(indices, dtype=np.int32)
    cdef int32_t[::1] ordr = np.ascontiguousarray(orders, dtype=np.int32)
    cdef int n = el.shape[0]
    out = np.zeros(nbits, dtype=np.uint8)
    cdef uint8_t[::1] bits = out
    if n == 0:
        return out
    cdef int cap = max_len + 1
    cdef int32_t* path = <int32_t*>malloc(cap * sizeof(int32_t))
    cdef int32_t* cursor = <int32_t*>malloc(cap * sizeof(int32_t))
    cdef int32_t* seq = <int32_t*>malloc((2 * cap + 1) * sizeof(int32_t))
    cdef uint8_t* on_path = <uint8_t*>malloc(n * sizeof(uint8_t))
    cdef int s, depth, u, v, p, i, length
    cdef uint64_t h
    try:
        for i in range(n):
            on_path[i] = 0
        for s in range(n):
            depth = 0
            path[0] = s
            cursor[0] = ptr[s]
            on_path[s] = 1
            seq[0] = el[s]
            length = 1
            h = _hash_path(seq, length, 0)
            bits[h % nbits] = 1
            while depth >= 0:
                u = path[depth]
                if depth == max_len or cursor[depth] >= ptr[u + 1]:
                    on_path[u] = 0
                    depth -= 1
                    continue
                p = cursor[depth]
                cursor[depth] += 1
                v = nbr[p]
                if on_path[v]:
                    continue
                depth += 1
                path[depth] = v
                cursor[depth] = ptr[v]
                on_path[v] = 1
                seq[2 * depth - 1] = ordr[p]
                seq[2 * depth] = el[v]
                length = 2 * depth + 1
                h = _hash_path(seq, length, _reverse_smaller(seq, length))
                bits[h % nbits] = 1
    finally:
        free(path)
        free(cursor)
        free(seq)
        free(on_path)
    return out


def tanimoto_matrix(bits):
    arr = np.ascontiguousarray(bits, dtype=np.uint8)
    cdef Py_ssize_t n = arr.shape[0]
    cdef Py_ssize_t nb = arr.shape[1]
    cdef Py_ssize_t words = (nb + 63) // 64
    padded = np.zeros((n, words * 64), dtype=np.uint8)
    padded[:, :nb] = arr
    packed_arr = np.packbits(padded, axis=1, bitorder="little").view(np.uint64)
    cdef uint64_t[:, ::1] packed = np.ascontiguousarray(packed_arr)
    out = np.empty((n, n), dtype=np.float64)
    cdef double[:, ::1] res = out
    counts_arr = np.zeros(n, dtype=np.int64)
    cdef long long[::1] counts = counts_arr
    cdef Py_ssize_t i, j, w
    cdef long inter, union_
    with nogil:
        for i in range(n):
            for w in range(words):
                counts[i] += __builtin_popcountll(packed[i, w])
        for i in range(n):
            res[i, i] = 1.0
            for j in range(i + 1, n):
                inter = 0
                for w in range(words):
                    inter += __builtin_popcountll(packed[i, w] & packed[j, w])
                union_ = counts[i] + counts[j] - inter
                if union_ == 0:
                    res[i, j] = 1.0
                else:
                    res[i, j] = <double>inter / <double>union_
                res[j, i] = res[i, j]
    return out
