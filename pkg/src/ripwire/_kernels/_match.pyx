# cython: boundscheck=False, wraparound=False, cdivision=True, language_level=3
"""Compiled anchored multi-pattern matcher.

Walks a CSR-encoded trie from each anchor position; the longest terminal
whose end lands on a word boundary wins. Mirrors pure.match_batch exactly
(integer algorithm, bit-identical results).
"""

import numpy as np

cimport numpy as cnp

cnp.import_array()

NAME = "cython"


cdef inline int _find_child(const int* trans_char, int lo, int hi, int c) noexcept nogil:
    cdef int mid
    while lo < hi:
        mid = (lo + hi) >> 1
        if trans_char[mid] < c:
            lo = mid + 1
        else:
            hi = mid
    return lo


def match_batch(
    cnp.ndarray[cnp.int32_t, ndim=1, mode="c"] text_cp,
    cnp.ndarray[cnp.uint8_t, ndim=1, mode="c"] is_word,
    cnp.ndarray[cnp.int64_t, ndim=1, mode="c"] starts,
    cnp.ndarray[cnp.int64_t, ndim=1, mode="c"] ends,
    cnp.ndarray[cnp.int32_t, ndim=1, mode="c"] node_ptr,
    cnp.ndarray[cnp.int32_t, ndim=1, mode="c"] trans_char,
    cnp.ndarray[cnp.int32_t, ndim=1, mode="c"] trans_child,
    cnp.ndarray[cnp.int32_t, ndim=1, mode="c"] terminal,
    cnp.ndarray[cnp.int32_t, ndim=1, mode="c"] out,
):
    cdef const int* cp = <const int*> cnp.PyArray_DATA(text_cp)
    cdef const unsigned char* word = <const unsigned char*> cnp.PyArray_DATA(is_word)
    cdef const long long* st = <const long long*> cnp.PyArray_DATA(starts)
    cdef const long long* en = <const long long*> cnp.PyArray_DATA(ends)
    cdef const int* ptr = <const int*> cnp.PyArray_DATA(node_ptr)
    cdef const int* tch = <const int*> cnp.PyArray_DATA(trans_char)
    cdef const int* tcd = <const int*> cnp.PyArray_DATA(trans_child)
    cdef const int* term = <const int*> cnp.PyArray_DATA(terminal)
    cdef int* res = <int*> cnp.PyArray_DATA(out)

    cdef Py_ssize_t n = starts.shape[0]
    cdef Py_ssize_t i
    cdef long long pos, end
    cdef int node, best, c, lo, hi, j, t

    with nogil:
        for i in range(n):
            pos = st[i]
            end = en[i]
            node = 0
            best = -1
            while pos < end:
                c = cp[pos]
                lo = ptr[node]
                hi = ptr[node + 1]
                j = _find_child(tch, lo, hi, c)
                if j == hi or tch[j] != c:
                    break
                node = tcd[j]
                pos += 1
                t = term[node]
                if t >= 0 and (pos == end or word[pos] == 0):
                    best = t
            res[i] = best
    return None
