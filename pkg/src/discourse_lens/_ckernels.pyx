"""Compiled kernels for the sequence scans. Semantics match ``_pykernels``."""
import numpy as np

NAME = "cython"


def add_bigrams(const int[::1] codes, long long[:, ::1] counts):
    cdef Py_ssize_t i, n = codes.shape[0]
    with nogil:
        for i in range(n - 1):
            counts[codes[i], codes[i + 1]] += 1


def gap_instances(const int[::1] codes, const unsigned char[::1] none_mask, int tnone):
    cdef Py_ssize_t n = codes.shape[0]
    out = np.empty((n, 3), dtype=np.int64)
    cdef long long[:, ::1] o = out
    cdef Py_ssize_t a, b, m = 0
    cdef int j
    with nogil:
        for a in range(n):
            j = codes[a]
            if none_mask[j]:
                continue
            b = a + 1
            while b < n and codes[b] == tnone:
                b += 1
            if b < n and not none_mask[codes[b]]:
                o[m, 0] = j
                o[m, 1] = codes[b]
                o[m, 2] = b - a - 1
                m += 1
    return out[:m]
