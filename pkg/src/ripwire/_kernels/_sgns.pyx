# cython: boundscheck=False, wraparound=False, cdivision=True, language_level=3
"""Compiled skip-gram negative-sampling epoch.

Sequential pair-by-pair updates (the reference trainer). Consumes the
counter-based splitmix64 stream in the same layout as the pure fallback:
per sentence, one window draw per position, then `negatives` draws per
(center, context) pair in pair order.
"""

from libc.math cimport exp, log
from libc.stdint cimport int32_t, int64_t, uint64_t
from libc.stdlib cimport free, malloc

import numpy as np

cimport numpy as cnp

cnp.import_array()

NAME = "cython"

cdef uint64_t _GAMMA = 0x9E3779B97F4A7C15ULL
cdef uint64_t _MIX1 = 0xBF58476D1CE4E5B9ULL
cdef uint64_t _MIX2 = 0x94D049BB133111EBULL
cdef double _DOT_CLAMP = 60.0


cdef inline uint64_t _mix64(uint64_t x) noexcept nogil:
    x ^= x >> 30
    x *= _MIX1
    x ^= x >> 27
    x *= _MIX2
    x ^= x >> 31
    return x


cdef inline uint64_t _draw(uint64_t seed, uint64_t counter) noexcept nogil:
    # Draw number `counter` (0-based) of the stream.
    return _mix64(seed + (counter + 1) * _GAMMA)


cdef inline double _sigmoid(double x) noexcept nogil:
    if x > _DOT_CLAMP:
        x = _DOT_CLAMP
    elif x < -_DOT_CLAMP:
        x = -_DOT_CLAMP
    return 1.0 / (1.0 + exp(-x))


cdef inline double _clip_log(double p) noexcept nogil:
    if p < 1e-12:
        p = 1e-12
    elif p > 1.0:
        p = 1.0
    return log(p)


def sgns_epoch(
    cnp.ndarray[cnp.int32_t, ndim=1, mode="c"] tokens,
    cnp.ndarray[cnp.int64_t, ndim=1, mode="c"] offsets,
    cnp.ndarray[cnp.float32_t, ndim=2, mode="c"] syn0,
    cnp.ndarray[cnp.float32_t, ndim=2, mode="c"] syn1,
    cnp.ndarray[cnp.int32_t, ndim=1, mode="c"] neg_table,
    int window,
    int negatives,
    double alpha_start,
    double alpha_min,
    long long words_done_start,
    long long total_words_all_epochs,
    unsigned long long seed,
    unsigned long long counter_start,
):
    cdef const int32_t* tok = <const int32_t*> cnp.PyArray_DATA(tokens)
    cdef const int64_t* off = <const int64_t*> cnp.PyArray_DATA(offsets)
    cdef float* s0 = <float*> cnp.PyArray_DATA(syn0)
    cdef float* s1 = <float*> cnp.PyArray_DATA(syn1)
    cdef const int32_t* table = <const int32_t*> cnp.PyArray_DATA(neg_table)

    cdef int64_t n_sentences = offsets.shape[0] - 1
    cdef int64_t d = syn0.shape[1]
    cdef uint64_t table_mask = <uint64_t> (neg_table.shape[0] - 1)
    cdef uint64_t counter = counter_start
    cdef int64_t words_done = words_done_start
    cdef double denom = <double> (total_words_all_epochs + 1)

    cdef double loss_sum = 0.0
    cdef int64_t n_events = 0

    cdef int64_t s, lo, hi, n, c, j, j2, k, left, right
    cdef int64_t center, ctx, target
    cdef double alpha, dot, p, g
    cdef float* vrow
    cdef float* urow
    cdef double* acc
    cdef int32_t* wins
    cdef int64_t max_n = 0

    for s in range(n_sentences):
        if off[s + 1] - off[s] > max_n:
            max_n = off[s + 1] - off[s]
    if max_n == 0:
        return 0.0, 0, counter, words_done

    acc = <double*> malloc(d * sizeof(double))
    wins = <int32_t*> malloc(max_n * sizeof(int32_t))
    if acc == NULL or wins == NULL:
        free(acc)
        free(wins)
        raise MemoryError()

    try:
        with nogil:
            for s in range(n_sentences):
                lo = off[s]
                hi = off[s + 1]
                n = hi - lo
                if n == 0:
                    continue
                alpha = alpha_start * (1.0 - words_done / denom)
                if alpha < alpha_min:
                    alpha = alpha_min
                for c in range(n):
                    wins[c] = <int32_t> (_draw(seed, counter) % <uint64_t> window) + 1
                    counter += 1
                for c in range(n):
                    center = tok[lo + c]
                    left = c - wins[c]
                    if left < 0:
                        left = 0
                    right = c + wins[c]
                    if right > n - 1:
                        right = n - 1
                    for j in range(left, right + 1):
                        if j == c:
                            continue
                        ctx = tok[lo + j]
                        vrow = s0 + center * d
                        for k in range(d):
                            acc[k] = 0.0
                        # positive target
                        urow = s1 + ctx * d
                        dot = 0.0
                        for k in range(d):
                            dot += (<double> vrow[k]) * (<double> urow[k])
                        p = _sigmoid(dot)
                        g = (p - 1.0) * alpha
                        loss_sum -= _clip_log(p)
                        for k in range(d):
                            acc[k] += g * urow[k]
                        for k in range(d):
                            urow[k] -= <float> (g * vrow[k])
                        # negative targets
                        for k in range(negatives):
                            target = table[_draw(seed, counter) & table_mask]
                            counter += 1
                            if target == ctx:
                                continue
                            urow = s1 + target * d
                            dot = 0.0
                            for j2 in range(d):
                                dot += (<double> vrow[j2]) * (<double> urow[j2])
                            p = _sigmoid(dot)
                            g = p * alpha
                            loss_sum -= _clip_log(1.0 - p)
                            for j2 in range(d):
                                acc[j2] += g * urow[j2]
                            for j2 in range(d):
                                urow[j2] -= <float> (g * vrow[j2])
                        for k in range(d):
                            vrow[k] -= <float> acc[k]
                        n_events += 1
                words_done += n
    finally:
        free(acc)
        free(wins)

    return loss_sum, n_events, counter, words_done
