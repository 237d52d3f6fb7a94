"""Hot inner loops of BPE training over flat int32 token arrays.

The working corpus is a flat array of token ids with one slot per unique
piece (``starts`` fixed, ``lengths`` shrinking as merges apply). Two
interchangeable lanes implement the kernels: numba ``@njit`` loops and a
pure-numpy fallback, selected at import time by ``LEXBPE_DISABLE_NUMBA=1``
(or automatically when numba is unavailable). Both lanes mutate
``tokens``/``lengths`` in place and emit signed adjacency-count deltas;
callers only consume order-independent aggregates, so the lanes are
exchangeable bit for bit.

Adjacent pairs are packed into int64 keys: ``(left << KEY_SHIFT) | right``.
"""

from __future__ import annotations

import os

import numpy as np

KEY_SHIFT = 21
KEY_MASK = (1 << KEY_SHIFT) - 1
MAX_ID = 1 << KEY_SHIFT

_flag = os.environ.get("LEXBPE_DISABLE_NUMBA", "")
NUMBA_DISABLED = _flag not in ("", "0")

HAS_NUMBA = False
if not NUMBA_DISABLED:
    try:
        from numba import njit

        HAS_NUMBA = True
    except ImportError:  # pragma: no cover - numba is a declared dependency
        HAS_NUMBA = False


def pair_key(left: int, right: int) -> int:
    return (left << KEY_SHIFT) | right


def split_key(key: int) -> tuple[int, int]:
    return key >> KEY_SHIFT, key & KEY_MASK


# ---------------------------------------------------------------------------
# numpy lane


def emit_adjacencies_np(tokens, starts, lengths, freqs, out_keys, out_wts):
    """Write one (key, +freq) entry per live adjacent pair; return the count."""
    total = tokens.shape[0]
    if total < 2:
        return 0
    word_of = np.repeat(np.arange(starts.shape[0]), np.diff(np.append(starts, total)))
    live = (np.arange(total) - starts[word_of]) < lengths[word_of]
    valid = (word_of[:-1] == word_of[1:]) & live[1:]
    idx = np.nonzero(valid)[0]
    n = idx.shape[0]
    out_keys[:n] = (tokens[idx].astype(np.int64) << KEY_SHIFT) | tokens[idx + 1]
    out_wts[:n] = freqs[word_of[idx]]
    return n


def merge_pair_np(tokens, starts, lengths, freqs, left, right, new_id, out_keys, out_wts):
    """Merge every (left, right) adjacency leftmost-first, in place.

    Emits -freq deltas for all old adjacencies of changed words and +freq
    for their new adjacencies; returns the number of deltas written.
    """
    total = tokens.shape[0]
    if total < 2:
        return 0
    nwords = starts.shape[0]
    word_of = np.repeat(np.arange(nwords), np.diff(np.append(starts, total)))
    rel = np.arange(total) - starts[word_of]
    live = rel < lengths[word_of]
    adj = (word_of[:-1] == word_of[1:]) & live[1:]
    cand = adj & (tokens[:-1] == left) & (tokens[1:] == right)
    pos = np.nonzero(cand)[0]
    if pos.shape[0] == 0:
        return 0

    if left == right and pos.shape[0] > 1:
        # Overlapping candidates form runs of consecutive positions; greedy
        # leftmost keeps the even offsets within each run.
        runstart = np.empty(pos.shape[0], dtype=bool)
        runstart[0] = True
        runstart[1:] = pos[1:] != pos[:-1] + 1
        anchor = np.maximum.accumulate(np.where(runstart, np.arange(pos.shape[0]), 0))
        pos = pos[(np.arange(pos.shape[0]) - anchor) % 2 == 0]

    changed = np.zeros(nwords, dtype=bool)
    changed[word_of[pos]] = True

    old_idx = np.nonzero(adj & changed[word_of[:-1]])[0]
    n = old_idx.shape[0]
    out_keys[:n] = (tokens[old_idx].astype(np.int64) << KEY_SHIFT) | tokens[old_idx + 1]
    out_wts[:n] = -freqs[word_of[old_idx]]

    # Rewrite: drop the right element of each kept candidate and compact
    # the surviving entries leftward within their word slots.
    hole = np.zeros(total, dtype=bool)
    hole[pos + 1] = True
    tokens[pos] = new_id
    before = np.cumsum(hole) - hole
    shift = before - before[starts[word_of]]
    keep_idx = np.nonzero(live & ~hole)[0]
    tokens[keep_idx - shift[keep_idx]] = tokens[keep_idx]
    lengths -= np.bincount(word_of[pos], minlength=nwords).astype(lengths.dtype)

    live = rel < lengths[word_of]
    new_idx = np.nonzero((word_of[:-1] == word_of[1:]) & live[1:] & changed[word_of[:-1]])[0]
    m = new_idx.shape[0]
    out_keys[n : n + m] = (tokens[new_idx].astype(np.int64) << KEY_SHIFT) | tokens[new_idx + 1]
    out_wts[n : n + m] = freqs[word_of[new_idx]]
    return n + m


# ---------------------------------------------------------------------------
# numba lane

if HAS_NUMBA:

    @njit(cache=True)
    def emit_adjacencies_nb(tokens, starts, lengths, freqs, out_keys, out_wts):
        n = 0
        for w in range(starts.shape[0]):
            s = starts[w]
            f = freqs[w]
            for i in range(s, s + lengths[w] - 1):
                out_keys[n] = (np.int64(tokens[i]) << KEY_SHIFT) | np.int64(tokens[i + 1])
                out_wts[n] = f
                n += 1
        return n

    @njit(cache=True)
    def merge_pair_nb(tokens, starts, lengths, freqs, left, right, new_id, out_keys, out_wts):
        n = 0
        for w in range(starts.shape[0]):
            s = starts[w]
            ln = lengths[w]
            if ln < 2:
                continue
            hit = False
            for i in range(s, s + ln - 1):
                if tokens[i] == left and tokens[i + 1] == right:
                    hit = True
                    break
            if not hit:
                continue
            f = freqs[w]
            for i in range(s, s + ln - 1):
                out_keys[n] = (np.int64(tokens[i]) << KEY_SHIFT) | np.int64(tokens[i + 1])
                out_wts[n] = -f
                n += 1
            read = s
            write = s
            end = s + ln
            while read < end:
                if read + 1 < end and tokens[read] == left and tokens[read + 1] == right:
                    tokens[write] = new_id
                    read += 2
                else:
                    tokens[write] = tokens[read]
                    read += 1
                write += 1
            lengths[w] = write - s
            for i in range(s, write - 1):
                out_keys[n] = (np.int64(tokens[i]) << KEY_SHIFT) | np.int64(tokens[i + 1])
                out_wts[n] = f
                n += 1
        return n

else:
    emit_adjacencies_nb = None
    merge_pair_nb = None


if HAS_NUMBA:
    emit_adjacencies = emit_adjacencies_nb
    merge_pair = merge_pair_nb
    ACTIVE_LANE = "numba"
else:
    emit_adjacencies = emit_adjacencies_np
    merge_pair = merge_pair_np
    ACTIVE_LANE = "numpy"


def aggregate_deltas(keys: np.ndarray, wts: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """Sum weights per key; sorted unique keys. Order-independent.

    bincount sums in float64, which is exact here: pair masses stay far
    below 2**53.
    """
    if keys.shape[0] == 0:
        return keys[:0], wts[:0]
    uniq, inv = np.unique(keys, return_inverse=True)
    sums = np.bincount(inv, weights=wts.astype(np.float64)).astype(np.int64)
    return uniq, sums
