"""Benchmark the numba training kernels against the pure-numpy fallback.

Builds a synthetic working corpus shaped like real training state (one slot
per unique piece, Zipf-ish frequencies), then times initial pair counting
and a sweep of merge applications through both lanes. Both lanes produce
identical results; this only measures speed.

Run:  python benchmarks/bench_kernels.py [--words 200000] [--merges 200]
"""

from __future__ import annotations

import argparse
import random
import time

import numpy as np

from lexbpe import kernels


def build_state(n_words: int, alphabet: int, seed: int):
    rng = random.Random(seed)
    words = [
        [rng.randrange(alphabet) for _ in range(rng.randint(2, 12))]
        for _ in range(n_words)
    ]
    tokens = np.array([t for w in words for t in w], dtype=np.int32)
    starts = np.cumsum([0] + [len(w) for w in words[:-1]]).astype(np.int64)
    lengths = np.array([len(w) for w in words], dtype=np.int64)
    freqs = np.array([max(1, int(1000 / (i + 1))) for i in range(n_words)], dtype=np.int64)
    return tokens, starts, lengths, freqs


def top_pairs(tokens, starts, lengths, freqs, k: int):
    out_keys = np.empty(2 * tokens.shape[0] + 16, dtype=np.int64)
    out_wts = np.empty_like(out_keys)
    n = kernels.emit_adjacencies_np(tokens, starts, lengths, freqs, out_keys, out_wts)
    keys, counts = kernels.aggregate_deltas(out_keys[:n], out_wts[:n])
    order = np.argsort(-counts, kind="stable")
    return [kernels.split_key(int(keys[i])) for i in order[:k]]


def time_lane(label, emit, merge, state, pairs, next_id):
    tokens, starts, lengths, freqs = (a.copy() for a in state)
    out_keys = np.empty(2 * tokens.shape[0] + 16, dtype=np.int64)
    out_wts = np.empty_like(out_keys)

    t0 = time.perf_counter()
    emit(tokens, starts, lengths, freqs, out_keys, out_wts)
    t_count = time.perf_counter() - t0

    t0 = time.perf_counter()
    for i, (left, right) in enumerate(pairs):
        merge(tokens, starts, lengths, freqs, left, right, next_id + i, out_keys, out_wts)
    t_merge = time.perf_counter() - t0

    print(f"{label:>8}  count: {t_count * 1e3:9.2f} ms   {len(pairs)} merges: {t_merge * 1e3:9.2f} ms")
    return t_count, t_merge


def main() -> None:
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--words", type=int, default=200_000)
    parser.add_argument("--alphabet", type=int, default=80)
    parser.add_argument("--merges", type=int, default=200)
    parser.add_argument("--seed", type=int, default=7)
    args = parser.parse_args()

    state = build_state(args.words, args.alphabet, args.seed)
    print(f"state: {state[0].shape[0]} tokens over {args.words} pieces")
    pairs = top_pairs(*state, k=args.merges)
    next_id = args.alphabet

    results = {}
    if kernels.HAS_NUMBA:
        # warm the JIT outside the timed region
        warm = tuple(a.copy() for a in state)
        ok = np.empty(2 * warm[0].shape[0] + 16, dtype=np.int64)
        ow = np.empty_like(ok)
        kernels.emit_adjacencies_nb(*warm, ok, ow)
        kernels.merge_pair_nb(*warm, pairs[0][0], pairs[0][1], next_id, ok, ow)
        results["numba"] = time_lane(
            "numba", kernels.emit_adjacencies_nb, kernels.merge_pair_nb, state, pairs, next_id
        )
    else:
        print("numba lane unavailable (LEXBPE_DISABLE_NUMBA set or numba missing)")
    results["numpy"] = time_lane(
        "numpy", kernels.emit_adjacencies_np, kernels.merge_pair_np, state, pairs, next_id
    )

    if "numba" in results:
        nb_total = sum(results["numba"])
        np_total = sum(results["numpy"])
        print(f"speedup: {np_total / nb_total:.1f}x (numpy/numba, count + merges)")


if __name__ == "__main__":
    main()
