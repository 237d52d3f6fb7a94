"""Encoding and decoding against a trained model.

Encoding normalizes, scans for added/special surfaces (longest match, left
to right), pre-tokenizes the remainder, and greedily applies the lowest-rank
merge inside each piece. Byte-level coverage makes encoding total: the
unknown token is never required.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable

from .errors import ConfigError, DecodeError, ModelError
from .model import TokenizerModel
from .normalization import (
    inverse_byte_remap,
    normalize,
    pretokenize,
    symbols_to_text,
    token_char_length,
)
from .scanner import TokenScanner

_CACHE_LIMIT = 1 << 19


@dataclass(frozen=True)
class EncodeResult:
    """Ids with their decoded surfaces and character spans.

    Offsets index the normalized text; they are contiguous, non-overlapping,
    and cover it exactly. A token holding only UTF-8 continuation bytes gets
    an empty span.
    """

    ids: tuple[int, ...]
    surfaces: tuple[str, ...]
    offsets: tuple[tuple[int, int], ...]

    def __len__(self) -> int:
        return len(self.ids)


class Tokenizer:
    """Reentrant encoder/decoder over an immutable model.

    Safe for concurrent use: the only mutable state is an internal piece
    memo whose entries are deterministic, so racing writers cannot change
    any result.
    """

    def __init__(self, model: TokenizerModel) -> None:
        model.validate()
        self.model = model
        self._id_to_tok = model.id_to_token()
        self._ranks: dict[tuple[str, str], int] = {}
        for rule in model.merges:
            self._ranks.setdefault((rule.left, rule.right), rule.rank)
        self._surface_id: dict[str, int] = dict(model.added)
        self._surface_id.update(model.specials)
        self._scanner = TokenScanner(list(self._surface_id))
        self._cache: dict[str, list[str]] = {}

    # -- encoding -----------------------------------------------------------

    def encode(self, text: str) -> EncodeResult:
        text = normalize(text, self.model.normalization)
        ids: list[int] = []
        surfaces: list[str] = []
        offsets: list[tuple[int, int]] = []
        pos = 0
        for match in self._scanner.scan(text):
            if match.start > pos:
                self._encode_span(text, pos, match.start, ids, surfaces, offsets)
            ids.append(self._surface_id[match.surface])
            surfaces.append(match.surface)
            offsets.append((match.start, match.end))
            pos = match.end
        if pos < len(text):
            self._encode_span(text, pos, len(text), ids, surfaces, offsets)
        return EncodeResult(tuple(ids), tuple(surfaces), tuple(offsets))

    def _encode_span(
        self,
        text: str,
        start: int,
        end: int,
        ids: list[int],
        surfaces: list[str],
        offsets: list[tuple[int, int]],
    ) -> None:
        vocab = self.model.vocab
        for piece in pretokenize(text[start:end], self.model.normalization):
            char_pos = start + piece.start
            for tok in self._bpe(piece.symbols):
                ids.append(vocab[tok])
                surfaces.append(symbols_to_text(tok))
                width = token_char_length(tok, exclude_space_marker=False)
                offsets.append((char_pos, char_pos + width))
                char_pos += width

    def _bpe(self, symbols: str) -> list[str]:
        """Greedy merge application: lowest rank first until none applies."""
        if len(symbols) < 2:
            return [symbols] if symbols else []
        cached = self._cache.get(symbols)
        if cached is not None:
            return cached
        ranks = self._ranks
        word = list(symbols)
        while len(word) >= 2:
            best_rank = -1
            best = None
            for pair in zip(word, word[1:]):
                rank = ranks.get(pair)
                if rank is not None and (best_rank < 0 or rank < best_rank):
                    best_rank = rank
                    best = pair
            if best is None:
                break
            merged = best[0] + best[1]
            out: list[str] = []
            i = 0
            while i < len(word):
                if i + 1 < len(word) and word[i] == best[0] and word[i + 1] == best[1]:
                    out.append(merged)
                    i += 2
                else:
                    out.append(word[i])
                    i += 1
            word = out
        if len(self._cache) >= _CACHE_LIMIT:
            self._cache.clear()
        self._cache[symbols] = word
        return word

    # -- decoding -----------------------------------------------------------

    def decode(self, ids: Iterable[int], skip_specials: bool = False) -> str:
        special_ids = self.model.special_ids() if skip_specials else frozenset()
        size = self.model.size
        parts: list[str] = []
        for pos, i in enumerate(ids):
            if not 0 <= i < size:
                raise DecodeError(f"id {i} at position {pos} is out of range (vocabulary size {size})")
            if i in special_ids:
                continue
            parts.append(self._id_to_tok[i])
        return inverse_byte_remap("".join(parts)).decode("utf-8", errors="replace")

    # -- task wrapping ------------------------------------------------------

    def encode_for_task(self, text: str, task: str) -> list[int]:
        """Wrap the body ids with the task's special tokens."""
        if task == "causal":
            wrappers = ("start", "end")
        elif task == "masked":
            wrappers = ("classifier", "separator")
        else:
            raise ConfigError(f"task must be 'causal' or 'masked', got {task!r}")
        roles = self.model.roles
        for name in wrappers:
            if name not in roles:
                raise ModelError(f"model defines no {name!r} special token")
        body = list(self.encode(text).ids)
        return [roles[wrappers[0]], *body, roles[wrappers[1]]]


def count_tokens(tokenizer: Tokenizer, text: str) -> int:
    return len(tokenizer.encode(text).ids)
