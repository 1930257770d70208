# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True
"""Compiled GF(2) kernels on packed uint64 rows.

Same contract as ``rectbar._kernels_py``; inputs and outputs are Python
int bitsets, packed into little-endian 64-bit words for the inner loops.
"""

from libc.stdint cimport uint64_t
from libc.stdlib cimport malloc, calloc, free
from libc.string cimport memcpy

cdef extern from *:
    """
    static inline int rb_ctz64(unsigned long long x) { return __builtin_ctzll(x); }
    static inline int rb_clz64(unsigned long long x) { return __builtin_clzll(x); }
    """
    int rb_ctz64(unsigned long long x) nogil
    int rb_clz64(unsigned long long x) nogil


cdef uint64_t* _pack(list vecs, Py_ssize_t n, Py_ssize_t nwords) except NULL:
    cdef uint64_t* buf = <uint64_t*> calloc(max(n * nwords, 1), sizeof(uint64_t))
    cdef Py_ssize_t i
    cdef bytes raw
    if buf == NULL:
        raise MemoryError()
    for i in range(n):
        raw = (<object> vecs[i]).to_bytes(nwords * 8, "little")
        memcpy(&buf[i * nwords], <const char*> raw, nwords * 8)
    return buf


cdef list _unpack(uint64_t* buf, Py_ssize_t n, Py_ssize_t nwords):
    cdef list out = []
    cdef Py_ssize_t i
    for i in range(n):
        out.append(int.from_bytes((<char*> &buf[i * nwords])[:nwords * 8], "little"))
    return out


cdef inline Py_ssize_t _lowest(uint64_t* row, Py_ssize_t lwords, uint64_t lastmask) nogil:
    cdef Py_ssize_t w
    cdef uint64_t x
    for w in range(lwords):
        x = row[w]
        if w == lwords - 1:
            x &= lastmask
        if x:
            return w * 64 + rb_ctz64(x)
    return -1


cdef inline Py_ssize_t _highest(uint64_t* row, Py_ssize_t nwords) nogil:
    cdef Py_ssize_t w = nwords - 1
    while w >= 0:
        if row[w]:
            return w * 64 + 63 - rb_clz64(row[w])
        w -= 1
    return -1


def eliminate(vecs, int limit):
    cdef list vs = list(vecs)
    cdef Py_ssize_t n = len(vs)
    cdef Py_ssize_t nbits = limit
    cdef Py_ssize_t i, w, p
    cdef object v
    for v in vs:
        if v < 0:
            raise ValueError("bit vectors must be non-negative")
        if v.bit_length() > nbits:
            nbits = v.bit_length()
    cdef Py_ssize_t nwords = (nbits + 63) // 64 if nbits > 0 else 1
    cdef Py_ssize_t lwords = (limit + 63) // 64
    cdef uint64_t lastmask = <uint64_t> -1
    if limit % 64:
        lastmask = ((<uint64_t> 1) << (limit % 64)) - 1
    cdef uint64_t* buf = _pack(vs, n, nwords)
    cdef Py_ssize_t* owner = <Py_ssize_t*> malloc(max(limit, 1) * sizeof(Py_ssize_t))
    cdef list pivots = [-1] * n
    cdef uint64_t* row
    cdef uint64_t* other
    if owner == NULL:
        free(buf)
        raise MemoryError()
    try:
        for i in range(limit):
            owner[i] = -1
        with nogil:
            for i in range(n):
                row = &buf[i * nwords]
                if lwords == 0:
                    continue
                p = _lowest(row, lwords, lastmask)
                while p >= 0:
                    if owner[p] < 0:
                        owner[p] = i
                        break
                    other = &buf[owner[p] * nwords]
                    for w in range(nwords):
                        row[w] ^= other[w]
                    p = _lowest(row, lwords, lastmask)
        for i in range(n):
            if lwords:
                pivots[i] = _lowest(&buf[i * nwords], lwords, lastmask)
        return _unpack(buf, n, nwords), pivots
    finally:
        free(owner)
        free(buf)


def reduce_boundary(cols):
    cdef list cs = list(cols)
    cdef Py_ssize_t n = len(cs)
    cdef Py_ssize_t nbits = 0
    cdef Py_ssize_t j, w, low
    cdef object v
    for v in cs:
        if v < 0:
            raise ValueError("bit vectors must be non-negative")
        if v.bit_length() > nbits:
            nbits = v.bit_length()
    cdef Py_ssize_t nwords = (nbits + 63) // 64 if nbits > 0 else 1
    cdef uint64_t* buf = _pack(cs, n, nwords)
    cdef Py_ssize_t* owner = <Py_ssize_t*> malloc(max(nbits, 1) * sizeof(Py_ssize_t))
    cdef list lows = [-1] * n
    cdef uint64_t* col
    cdef uint64_t* other
    if owner == NULL:
        free(buf)
        raise MemoryError()
    try:
        for j in range(nbits):
            owner[j] = -1
        with nogil:
            for j in range(n):
                col = &buf[j * nwords]
                low = _highest(col, nwords)
                while low >= 0:
                    if owner[low] < 0:
                        owner[low] = j
                        break
                    other = &buf[owner[low] * nwords]
                    for w in range(nwords):
                        col[w] ^= other[w]
                    low = _highest(col, nwords)
        for j in range(n):
            lows[j] = _highest(&buf[j * nwords], nwords)
        return _unpack(buf, n, nwords), lows
    finally:
        free(owner)
        free(buf)
