"""BPE vocabulary training with curated-token injection and padding.

Training keeps one slot per unique pre-tokenized piece, counts adjacent
pairs exactly (weighted by piece frequency), and repeatedly merges the most
frequent eligible pair. Eligibility honors the optional merged-surface
length cap and the minimum pair frequency; ties break lexicographically on
the (left, right) token strings. Catalog surfaces are injected as added
tokens before learning and their spans never enter pair statistics: the
same longest-match scan used at encode time removes them from the working
corpus.
"""

from __future__ import annotations

import heapq
from collections import Counter
from dataclasses import dataclass, field, replace
from typing import Iterable, Mapping, Sequence

import numpy as np

from .catalog import CatalogSpec, TokenCatalog, assemble_catalog
from .errors import ConfigError, TrainingError
from .model import (
    DEFAULT_SPECIAL_SURFACES,
    MergeRule,
    TokenizerModel,
    base_model,
    infer_role,
)
from .normalization import (
    NormalizationConfig,
    normalize,
    pretokenize,
    text_to_symbols,
    token_char_length,
)
from .scanner import TokenScanner

PRESET_VOCAB_SIZES = (4096, 8192, 16384, 65536, 131072)


def _is_power_of_two(n: int) -> bool:
    return n > 0 and n & (n - 1) == 0


def _next_power_of_two(n: int) -> int:
    p = 1
    while p < n:
        p <<= 1
    return p


@dataclass(frozen=True)
class TrainerConfig:
    """Everything that determines a training run besides the corpus."""

    target_vocab_size: int
    max_token_chars: int | None = None
    min_pair_frequency: int = 2
    catalog: CatalogSpec = field(default_factory=CatalogSpec)
    normalization: NormalizationConfig = field(default_factory=NormalizationConfig)
    special_tokens: tuple[str, ...] = tuple(DEFAULT_SPECIAL_SURFACES.values())

    def __post_init__(self) -> None:
        if not _is_power_of_two(self.target_vocab_size):
            raise ConfigError(
                f"target_vocab_size must be a power of 2, got {self.target_vocab_size}"
            )
        if self.max_token_chars is not None and self.max_token_chars < 2:
            raise ConfigError(f"max_token_chars must be >= 2, got {self.max_token_chars}")
        if self.min_pair_frequency < 1:
            raise ConfigError("min_pair_frequency must be >= 1")
        if len(set(self.special_tokens)) != len(self.special_tokens):
            raise ConfigError("special_tokens contains duplicates")


@dataclass
class PairStats:
    """Exact adjacent-pair counts over a working corpus."""

    counts: Counter

    def total_mass(self) -> int:
        return sum(self.counts.values())


def count_pairs(working_corpus: Mapping[Sequence[str] | str, int]) -> PairStats:
    """Adjacent-pair counts weighted by piece frequency.

    Pieces are sequences of token strings; a plain string counts as a
    sequence of single-symbol tokens.
    """
    counts: Counter = Counter()
    for piece, freq in working_corpus.items():
        for a, b in zip(piece, piece[1:]):
            counts[(a, b)] += freq
    return PairStats(counts)


def select_merge(
    stats: PairStats,
    cap: int | None = None,
    min_frequency: int = 1,
    banned: frozenset | set = frozenset(),
    blocked_surfaces: frozenset | set = frozenset(),
) -> tuple[tuple[str, str], int] | None:
    """The highest-count eligible pair, ties broken lexicographically.

    A pair is eligible when its count meets ``min_frequency``, its merged
    surface respects ``cap`` (visible characters, leading space marker
    excluded), it has not been merged before, and the merged surface is not
    reserved by an added or special token. Returns None on exhaustion.
    """
    best_pair: tuple[str, str] | None = None
    best_count = 0
    for pair, cnt in stats.counts.items():
        if cnt < min_frequency or pair in banned:
            continue
        merged = pair[0] + pair[1]
        if merged in blocked_surfaces:
            continue
        if cap is not None and token_char_length(merged) > cap:
            continue
        if cnt > best_count or (cnt == best_count and (best_pair is None or pair < best_pair)):
            best_pair, best_count = pair, cnt
    if best_pair is None:
        return None
    return best_pair, best_count


def inject_custom_tokens(model: TokenizerModel, catalog: TokenCatalog) -> TokenizerModel:
    """Register every catalog surface as an atomically matched added token.

    Surfaces already in the vocabulary keep their id (a multi-symbol surface
    still becomes added so it matches atomically across piece boundaries).
    Single-byte surfaces are atomic by construction and are never scanner
    tokens: registering " " would dissolve every space-adhered piece.
    Injection is idempotent.
    """
    vocab = dict(model.vocab)
    added = dict(model.added)
    for surface in catalog.surfaces():
        sym = text_to_symbols(surface)
        existing = vocab.get(sym)
        if existing is not None:
            if len(sym) > 1 and surface not in model.specials:
                added.setdefault(surface, existing)
            continue
        new_id = len(vocab)
        vocab[sym] = new_id
        added[surface] = new_id
    out = replace(model, vocab=vocab, added=added)
    out.validate()
    return out


def whitespace_filler_surfaces():
    """Deterministic padding schedule: space runs, newline runs, tab runs,
    then mixed space/newline strings ordered by length and binary pattern."""
    for ch in (" ", "\n", "\t"):
        for n in range(1, 129):
            yield ch * n
    n = 2
    while True:
        for mask in range(1, (1 << n) - 1):
            yield "".join("\n" if (mask >> (n - 1 - j)) & 1 else " " for j in range(n))
        n += 1


def pad_to_power_of_two(model: TokenizerModel, target: int) -> TokenizerModel:
    """Append whitespace filler tokens until the vocabulary size is target."""
    if not _is_power_of_two(target):
        raise ConfigError(f"padding target must be a power of 2, got {target}")
    if target < model.size:
        raise TrainingError(
            f"padding target {target} is smaller than the current size {model.size}"
        )
    if target == model.size:
        return model
    vocab = dict(model.vocab)
    added = dict(model.added)
    for surface in whitespace_filler_surfaces():
        if len(vocab) == target:
            break
        sym = text_to_symbols(surface)
        if sym in vocab:
            continue
        new_id = len(vocab)
        vocab[sym] = new_id
        added[surface] = new_id
    out = replace(model, vocab=vocab, added=added)
    out.validate()
    return out


def _collect_pieces(
    documents: Iterable[str],
    normalization: NormalizationConfig,
    scanner: TokenScanner,
) -> tuple[Counter, int]:
    """Piece frequencies over the corpus, with added-token spans removed."""
    working: Counter = Counter()
    ndocs = 0
    for doc in documents:
        ndocs += 1
        text = normalize(doc, normalization)
        pos = 0
        for match in scanner.scan(text):
            if match.start > pos:
                for piece in pretokenize(text[pos : match.start], normalization):
                    working[piece.symbols] += 1
            pos = match.end
        if pos < len(text):
            for piece in pretokenize(text[pos:], normalization):
                working[piece.symbols] += 1
    return working, ndocs


class _MergeLoop:
    """Incremental pair-count state driving merge selection.

    Counts live in a dict keyed by packed pair keys; a lazy max-heap ordered
    by (-count, left string, right string) realizes the tie rule. Entries go
    stale when counts change; staleness is detected at pop time.
    """

    def __init__(
        self,
        working: Mapping[str, int],
        sym_to_id: Mapping[str, int],
        id_to_tok: list[str],
        cap: int | None,
    ) -> None:
        # Deferred so that encode/decode-only callers never pay for the
        # numba import behind the kernel module.
        from . import kernels

        self.kernels = kernels
        self.id_to_tok = id_to_tok
        self.cap = cap
        self.visible: list[int] = [token_char_length(t, exclude_space_marker=False) for t in id_to_tok]
        self.leading_space: list[bool] = [
            token_char_length(t, exclude_space_marker=True) < v
            for t, v in zip(id_to_tok, self.visible)
        ]

        pieces = list(working.items())
        total = sum(len(p) for p, _ in pieces)
        self.tokens = np.empty(total, dtype=np.int32)
        self.starts = np.empty(len(pieces), dtype=np.int64)
        self.lengths = np.empty(len(pieces), dtype=np.int64)
        self.freqs = np.empty(len(pieces), dtype=np.int64)
        at = 0
        for w, (piece, freq) in enumerate(pieces):
            self.starts[w] = at
            self.lengths[w] = len(piece)
            self.freqs[w] = freq
            for ch in piece:
                self.tokens[at] = sym_to_id[ch]
                at += 1

        self.delta_keys = np.empty(max(2 * total, 16), dtype=np.int64)
        self.delta_wts = np.empty(max(2 * total, 16), dtype=np.int64)

        n = kernels.emit_adjacencies(
            self.tokens, self.starts, self.lengths, self.freqs,
            self.delta_keys, self.delta_wts,
        )
        keys, sums = kernels.aggregate_deltas(self.delta_keys[:n], self.delta_wts[:n])
        self.counts: dict[int, int] = {int(k): int(c) for k, c in zip(keys, sums)}
        self.heap: list[tuple[int, str, str, int]] = []
        for key, cnt in self.counts.items():
            self._push(key, cnt)

    def register_token(self, token: str, token_id: int, left_id: int, right_id: int) -> None:
        """Record a newly created merged token (no-op for reused ids)."""
        if token_id == len(self.id_to_tok):
            self.id_to_tok.append(token)
            self.visible.append(self.visible[left_id] + self.visible[right_id])
            self.leading_space.append(self.leading_space[left_id])

    def _merged_visible(self, left_id: int, right_id: int) -> int:
        n = self.visible[left_id] + self.visible[right_id]
        return n - 1 if self.leading_space[left_id] else n

    def _push(self, key: int, cnt: int) -> None:
        left_id, right_id = self.kernels.split_key(key)
        if self.cap is not None and self._merged_visible(left_id, right_id) > self.cap:
            return
        heapq.heappush(self.heap, (-cnt, self.id_to_tok[left_id], self.id_to_tok[right_id], key))

    def pop_best(self, min_frequency: int, skip: set[int], blocked: frozenset[str]) -> tuple[int, int] | None:
        """Highest-count live pair, or None when training is exhausted."""
        while self.heap:
            negc, left_s, right_s, key = heapq.heappop(self.heap)
            cnt = self.counts.get(key)
            if cnt is None or cnt != -negc:
                continue  # stale entry
            if cnt < min_frequency:
                # The top live entry is below threshold, so everything is.
                heapq.heappush(self.heap, (negc, left_s, right_s, key))
                return None
            if key in skip:
                continue
            if left_s + right_s in blocked:
                skip.add(key)
                continue
            return key, cnt
        return None

    def apply(self, key: int, new_id: int) -> None:
        left_id, right_id = self.kernels.split_key(key)
        n = self.kernels.merge_pair(
            self.tokens, self.starts, self.lengths, self.freqs,
            left_id, right_id, new_id, self.delta_keys, self.delta_wts,
        )
        keys, sums = self.kernels.aggregate_deltas(self.delta_keys[:n], self.delta_wts[:n])
        for k, d in zip(keys.tolist(), sums.tolist()):
            if d == 0:
                continue
            cnt = self.counts.get(k, 0) + d
            if cnt < 0:
                raise AssertionError("pair count went negative; kernel delta bug")
            if cnt == 0:
                self.counts.pop(k, None)
            else:
                self.counts[k] = cnt
                self._push(k, cnt)
        if key in self.counts:
            raise AssertionError("merged pair still has occurrences; kernel bug")


def train(documents: Iterable[str], config: TrainerConfig) -> TokenizerModel:
    """Train a model to exactly ``config.target_vocab_size`` entries.

    Deterministic for a fixed corpus and config: the result is independent
    of worker scheduling because pair counts are plain sums and selection
    happens after full aggregation.
    """
    catalog = assemble_catalog(config)

    surfaces: dict[str, str] = {}
    for surface in config.special_tokens:
        role = infer_role(surface)
        if role is not None and role not in surfaces:
            surfaces[role] = surface
        else:
            surfaces[f"special:{surface}"] = surface
    skeleton = base_model(config.normalization, special_surfaces=surfaces)
    model = inject_custom_tokens(skeleton, catalog)

    if config.target_vocab_size < model.size:
        minimum = _next_power_of_two(model.size)
        raise TrainingError(
            f"target_vocab_size {config.target_vocab_size} is below the "
            f"base+special+catalog size {model.size}; minimum feasible target is {minimum}"
        )

    scanner = TokenScanner(list(model.specials) + list(model.added))
    working, ndocs = _collect_pieces(documents, config.normalization, scanner)
    if ndocs == 0:
        raise TrainingError("corpus is empty: no documents to train on")

    vocab = dict(model.vocab)
    id_to_tok = model.id_to_token()
    blocked = frozenset(
        [text_to_symbols(s) for s in model.specials] + [text_to_symbols(s) for s in model.added]
    )

    merges: list[MergeRule] = []
    if working and config.target_vocab_size > len(vocab):
        # id_to_tok is shared with the loop and extended as tokens are created.
        loop = _MergeLoop(working, vocab, id_to_tok, config.max_token_chars)
        skip: set[int] = set()
        while len(vocab) < config.target_vocab_size:
            picked = loop.pop_best(config.min_pair_frequency, skip, blocked)
            if picked is None:
                break
            key, _count = picked
            left_id, right_id = loop.kernels.split_key(key)
            left_s, right_s = id_to_tok[left_id], id_to_tok[right_id]
            merged_s = left_s + right_s
            merged_id = vocab.get(merged_s)
            if merged_id is None:
                merged_id = len(vocab)
                vocab[merged_s] = merged_id
                loop.register_token(merged_s, merged_id, left_id, right_id)
            merges.append(MergeRule(left_s, right_s, merged_s, len(merges)))
            skip.add(key)
            loop.apply(key, merged_id)

    model = replace(model, vocab=vocab, merges=tuple(merges))
    model = pad_to_power_of_two(model, config.target_vocab_size)
    model.validate()
    return model
