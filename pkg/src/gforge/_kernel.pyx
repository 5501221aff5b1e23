# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True
"""Compiled elimination kernels (same contract as ``_kernel_py``)."""

from libc.stdlib cimport malloc, free
from libc.string cimport memset


def axpy(dict dst, dict src, c):
    cdef object k, v, w
    if not c:
        return
    for k, v in src.items():
        w = dst.get(k)
        if w is None:
            dst[k] = c * v
        else:
            w = w + c * v
            if w:
                dst[k] = w
            else:
                del dst[k]


def reduce_vector(dict vec, dict basis, combo=None, basis_combos=None):
    cdef object k, b, c
    while vec:
        k = min(vec)
        b = basis.get(k)
        if b is None:
            return k
        c = -vec[k]
        axpy(vec, <dict>b, c)
        if combo is not None:
            axpy(<dict>combo, <dict>basis_combos[k], c)
    return -1


cdef long long _inv_mod(long long a, long long p):
    cdef long long r = 1, e = p - 2
    a %= p
    while e > 0:
        if e & 1:
            r = (r * a) % p
        a = (a * a) % p
        e >>= 1
    return r


def rank_mod(columns, Py_ssize_t nrows, long long p):
    """Dense Gaussian elimination over GF(p), p < 2**31."""
    cdef Py_ssize_t ncols = len(columns)
    if ncols == 0 or nrows == 0:
        return 0
    # store the transpose: one row per input column
    cdef long long *m = <long long *> malloc(ncols * nrows * sizeof(long long))
    if m == NULL:
        raise MemoryError()
    memset(m, 0, ncols * nrows * sizeof(long long))
    cdef Py_ssize_t i, j, r, c, piv
    cdef long long x, f, inv
    try:
        for i, col in enumerate(columns):
            for k, v in col.items():
                x = v % p
                m[i * nrows + <Py_ssize_t>k] = x
        r = 0
        for c in range(nrows):
            if r == ncols:
                break
            piv = -1
            for i in range(r, ncols):
                if m[i * nrows + c] != 0:
                    piv = i
                    break
            if piv < 0:
                continue
            if piv != r:
                for j in range(nrows):
                    x = m[piv * nrows + j]
                    m[piv * nrows + j] = m[r * nrows + j]
                    m[r * nrows + j] = x
            inv = _inv_mod(m[r * nrows + c], p)
            for j in range(c, nrows):
                m[r * nrows + j] = (m[r * nrows + j] * inv) % p
            for i in range(r + 1, ncols):
                f = m[i * nrows + c]
                if f != 0:
                    for j in range(c, nrows):
                        if m[r * nrows + j] != 0:
                            m[i * nrows + j] = (m[i * nrows + j] - f * m[r * nrows + j]) % p
                            if m[i * nrows + j] < 0:
                                m[i * nrows + j] += p
            r += 1
        return r
    finally:
        free(m)


def rref_mod(rows, Py_ssize_t ncols, long long p):
    cdef Py_ssize_t nrows = len(rows)
    cdef Py_ssize_t i, j, r, c, piv
    cdef long long x, f, inv
    if nrows == 0 or ncols == 0:
        return [list(rw) for rw in rows], []
    cdef long long *m = <long long *> malloc(ncols * nrows * sizeof(long long))
    if m == NULL:
        raise MemoryError()
    pivots = []
    try:
        for i in range(nrows):
            rw = rows[i]
            for j in range(ncols):
                x = rw[j] % p
                m[i * ncols + j] = x
        r = 0
        for c in range(ncols):
            if r == nrows:
                break
            piv = -1
            for i in range(r, nrows):
                if m[i * ncols + c] != 0:
                    piv = i
                    break
            if piv < 0:
                continue
            if piv != r:
                for j in range(ncols):
                    x = m[piv * ncols + j]
                    m[piv * ncols + j] = m[r * ncols + j]
                    m[r * ncols + j] = x
            inv = _inv_mod(m[r * ncols + c], p)
            for j in range(ncols):
                m[r * ncols + j] = (m[r * ncols + j] * inv) % p
            for i in range(nrows):
                if i != r:
                    f = m[i * ncols + c]
                    if f != 0:
                        for j in range(ncols):
                            m[i * ncols + j] = (m[i * ncols + j] - f * m[r * ncols + j]) % p
                            if m[i * ncols + j] < 0:
                                m[i * ncols + j] += p
            pivots.append(c)
            r += 1
        out = [[m[i * ncols + j] for j in range(ncols)] for i in range(nrows)]
        return out, pivots
    finally:
        free(m)
