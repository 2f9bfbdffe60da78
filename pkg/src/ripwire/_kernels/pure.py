"""Pure NumPy fallback kernels.

Same call signatures and the same random-number stream as the compiled
backend. The matcher is bit-identical to the compiled one (integer
algorithm). The embedding trainer consumes the identical splitmix64
counter stream (same window sizes, same negative samples) but applies
updates batched per sentence instead of pair by pair, so trained vectors
agree statistically, not bitwise. Each backend is deterministic on its
own.
"""

from __future__ import annotations

from bisect import bisect_left

import numpy as np

NAME = "pure"

_GAMMA = 0x9E3779B97F4A7C15
_MIX1 = 0xBF58476D1CE4E5B9
_MIX2 = 0x94D049BB133111EB
_MASK = (1 << 64) - 1

# Update batching granularity of the fallback trainer. One sentence per
# batch: tokens repeat rarely within a sentence, so summed stale-gradient
# application stays close to the compiled backend's sequential updates
# (larger chunks overshoot badly for frequent tokens). Fixed, not
# configurable: changing it changes results.
_CHUNK_SENTENCES = 1

# Dot products are clamped symmetrically before the sigmoid in both
# backends so extreme scores cannot overflow.
_DOT_CLAMP = 60.0


def rng_block(seed: int, counter: int, count: int) -> np.ndarray:
    """Draws [counter, counter+count) of the counter-based splitmix64 stream."""
    idx = np.arange(counter + 1, counter + 1 + count, dtype=np.uint64)
    x = np.uint64(seed & _MASK) + idx * np.uint64(_GAMMA)
    x = x ^ (x >> np.uint64(30))
    x = x * np.uint64(_MIX1)
    x = x ^ (x >> np.uint64(27))
    x = x * np.uint64(_MIX2)
    x = x ^ (x >> np.uint64(31))
    return x


def match_batch(
    text_cp: np.ndarray,
    is_word: np.ndarray,
    starts: np.ndarray,
    ends: np.ndarray,
    node_ptr: np.ndarray,
    trans_char: np.ndarray,
    trans_child: np.ndarray,
    terminal: np.ndarray,
    out: np.ndarray,
) -> None:
    """Anchored longest-match trie walk for a batch of text slices.

    For anchor i the walk starts at text_cp[starts[i]] and may consume up
    to ends[i]. out[i] receives the pattern id of the longest match whose
    end falls on a word boundary (next char not alphanumeric), or -1.
    """
    cp = text_cp.tolist()
    word = is_word.tolist()
    ptr = node_ptr.tolist()
    tch = trans_char.tolist()
    tcd = trans_child.tolist()
    term = terminal.tolist()
    res = [-1] * len(starts)
    for i, (pos, end) in enumerate(zip(starts.tolist(), ends.tolist())):
        node = 0
        best = -1
        while pos < end:
            lo = ptr[node]
            hi = ptr[node + 1]
            c = cp[pos]
            j = bisect_left(tch, c, lo, hi)
            if j == hi or tch[j] != c:
                break
            node = tcd[j]
            pos += 1
            t = term[node]
            if t >= 0 and (pos == end or not word[pos]):
                best = t
        res[i] = best
    out[:] = res


def _sigmoid(x: np.ndarray) -> np.ndarray:
    return 1.0 / (1.0 + np.exp(-np.clip(x, -_DOT_CLAMP, _DOT_CLAMP)))


def sgns_epoch(
    tokens: np.ndarray,
    offsets: np.ndarray,
    syn0: np.ndarray,
    syn1: np.ndarray,
    neg_table: np.ndarray,
    window: int,
    negatives: int,
    alpha_start: float,
    alpha_min: float,
    words_done_start: int,
    total_words_all_epochs: int,
    seed: int,
    counter_start: int,
):
    """One skip-gram negative-sampling epoch over encoded sentences.

    tokens holds all sentences concatenated; offsets (len n_sentences+1)
    delimits them. syn0/syn1 are updated in place. The draw stream per
    sentence is: one window draw per position, then `negatives` draws per
    (center, context) pair in pair order. Returns
    (loss_sum, n_events, counter_end, words_done_end).
    """
    table_mask = np.uint64(len(neg_table) - 1)
    n_sentences = len(offsets) - 1
    counter = counter_start
    words_done = words_done_start
    loss_sum = 0.0
    n_events = 0
    denom = float(total_words_all_epochs + 1)

    for chunk_start in range(0, n_sentences, _CHUNK_SENTENCES):
        chunk_end = min(chunk_start + _CHUNK_SENTENCES, n_sentences)
        centers_parts = []
        contexts_parts = []
        alphas_parts = []
        negs_parts = []
        for s in range(chunk_start, chunk_end):
            lo = int(offsets[s])
            hi = int(offsets[s + 1])
            n = hi - lo
            if n == 0:
                continue
            alpha = alpha_start * (1.0 - words_done / denom)
            if alpha < alpha_min:
                alpha = alpha_min
            sent = tokens[lo:hi]
            wins = (rng_block(seed, counter, n) % np.uint64(window)).astype(np.int64) + 1
            counter += n
            # Pair layout must match the compiled kernel: centers ascending,
            # context offsets ascending within each center.
            pos = np.arange(n, dtype=np.int64)
            left = np.maximum(pos - wins, 0)
            right = np.minimum(pos + wins, n - 1)
            counts = right - left
            total = int(counts.sum())
            if total:
                center_idx = np.repeat(pos, counts)
                bounds = np.cumsum(counts)
                flat = np.arange(total, dtype=np.int64) - (bounds - counts)[center_idx]
                ctx_idx = np.repeat(left, counts) + flat
                ctx_idx += ctx_idx >= center_idx
                centers_parts.append(sent[center_idx])
                contexts_parts.append(sent[ctx_idx])
                alphas_parts.append(np.full(total, alpha))
                negs_parts.append(rng_block(seed, counter, total * negatives))
                counter += total * negatives
            words_done += n

        if not centers_parts:
            continue
        centers = np.concatenate(centers_parts).astype(np.int64)
        contexts = np.concatenate(contexts_parts).astype(np.int64)
        alphas = np.concatenate(alphas_parts)
        n_pairs = len(centers)

        draws = np.concatenate(negs_parts)
        negs = neg_table[(draws & table_mask).astype(np.int64)].astype(np.int64)
        negs = negs.reshape(n_pairs, negatives)
        keep = negs != contexts[:, None]

        v = syn0[centers].astype(np.float64)
        u_pos = syn1[contexts].astype(np.float64)
        dot_pos = np.einsum("ij,ij->i", v, u_pos)
        p_pos = _sigmoid(dot_pos)
        g_pos = (p_pos - 1.0) * alphas

        u_neg = syn1[negs].astype(np.float64)
        dot_neg = np.einsum("ijk,ik->ij", u_neg, v)
        p_neg = _sigmoid(dot_neg)
        g_neg = p_neg * alphas[:, None] * keep

        grad_v = g_pos[:, None] * u_pos + np.einsum("ij,ijk->ik", g_neg, u_neg)

        loss_sum += float(
            -np.log(np.clip(p_pos, 1e-12, 1.0)).sum()
            - (np.log(np.clip(1.0 - p_neg, 1e-12, 1.0)) * keep).sum()
        )
        n_events += n_pairs

        np.add.at(syn0, centers, (-grad_v).astype(np.float32))
        np.add.at(syn1, contexts, (-(g_pos[:, None] * v)).astype(np.float32))
        flat_negs = negs.reshape(-1)
        flat_g = (g_neg[:, :, None] * v[:, None, :]).reshape(-1, v.shape[1])
        np.add.at(syn1, flat_negs, (-flat_g).astype(np.float32))

    return loss_sum, n_events, counter, words_done
