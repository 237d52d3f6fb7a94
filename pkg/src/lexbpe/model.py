"""Immutable tokenizer model: vocabulary, ranked merges, added and special tokens.

Token strings in the vocabulary live in byte-symbol space; added and special
tokens are keyed by their raw surfaces. Ids form one dense space 0..size-1.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from collections import Counter

from .errors import ModelError
from .normalization import (
    NormalizationConfig,
    symbols_to_text,
    text_to_symbols,
)

# Named roles a model may assign to its special tokens.
SPECIAL_ROLES = ("start", "end", "pad", "unknown", "separator", "classifier", "mask")

DEFAULT_SPECIAL_SURFACES: dict[str, str] = {
    "start": "<|start|>",
    "end": "<|end|>",
    "pad": "<|pad|>",
    "unknown": "<|unk|>",
    "separator": "<|sep|>",
    "classifier": "<|cls|>",
    "mask": "<|mask|>",
}

# Conventional surfaces that identify a role when loading external files.
ROLE_SURFACES: dict[str, tuple[str, ...]] = {
    "start": ("<|start|>", "<s>", "<bos>", "<|bos|>", "<|startoftext|>", "[BOS]"),
    "end": ("<|end|>", "</s>", "<eos>", "<|eos|>", "<|endoftext|>", "[EOS]"),
    "pad": ("<|pad|>", "<pad>", "[PAD]"),
    "unknown": ("<|unk|>", "<unk>", "[UNK]"),
    "separator": ("<|sep|>", "<sep>", "[SEP]"),
    "classifier": ("<|cls|>", "<cls>", "[CLS]"),
    "mask": ("<|mask|>", "<mask>", "[MASK]"),
}


def infer_role(surface: str) -> str | None:
    """Map a special-token surface to a named role by convention."""
    for role, surfaces in ROLE_SURFACES.items():
        if surface in surfaces:
            return role
    return None


@dataclass(frozen=True)
class MergeRule:
    """One learned pair-join; rank is its creation order."""

    left: str
    right: str
    merged: str
    rank: int


@dataclass(frozen=True)
class TokenizerModel:
    normalization: NormalizationConfig
    vocab: dict[str, int]
    merges: tuple[MergeRule, ...] = ()
    added: dict[str, int] = field(default_factory=dict)
    specials: dict[str, int] = field(default_factory=dict)
    roles: dict[str, int] = field(default_factory=dict)
    post_processor: dict | None = None

    @property
    def size(self) -> int:
        return len(self.vocab)

    def id_to_token(self) -> list[str]:
        out = [""] * len(self.vocab)
        for tok, i in self.vocab.items():
            out[i] = tok
        return out

    def special_ids(self) -> frozenset[int]:
        return frozenset(self.specials.values())

    def added_ids(self) -> frozenset[int]:
        return frozenset(self.added.values())

    def validate(self) -> None:
        """Check the structural invariants; raise ModelError on violation."""
        ids = sorted(self.vocab.values())
        if ids != list(range(len(ids))):
            raise ModelError("vocabulary ids must be dense 0..size-1 without gaps")
        for rule in self.merges:
            if rule.merged != rule.left + rule.right:
                raise ModelError(f"merge rank {rule.rank}: merged != left + right")
            for part in (rule.left, rule.right, rule.merged):
                if part not in self.vocab:
                    raise ModelError(f"merge rank {rule.rank} references unknown token {part!r}")
        ranks = [r.rank for r in self.merges]
        if ranks != list(range(len(ranks))):
            raise ModelError("merge ranks must be dense and in creation order")
        learned = {self.vocab[r.merged] for r in self.merges}
        for kind, table in (("special", self.specials), ("added", self.added)):
            for surface, i in table.items():
                key = text_to_symbols(surface)
                if self.vocab.get(key) != i:
                    raise ModelError(f"{kind} token {surface!r} id disagrees with the vocabulary")
        # A special id may never double as a learned token; an added token may
        # share a learned id only because it names the identical surface
        # (post-hoc injection of an already-learned surface).
        for surface, i in self.specials.items():
            if i in learned:
                raise ModelError(f"special token {surface!r} id collides with a learned token")
        for surface, i in self.added.items():
            if i in self.special_ids():
                raise ModelError(f"added token {surface!r} id collides with a special token")
        for role, i in self.roles.items():
            if role not in SPECIAL_ROLES:
                raise ModelError(f"unknown special role {role!r}")
            if i not in self.special_ids():
                raise ModelError(f"role {role!r} does not point at a special token")

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, TokenizerModel):
            return NotImplemented
        return (
            self.normalization == other.normalization
            and self.vocab == other.vocab
            and self.merges == other.merges
            and self.added == other.added
            and self.specials == other.specials
            and self.roles == other.roles
            and self.post_processor == other.post_processor
        )


def base_model(
    normalization: NormalizationConfig | None = None,
    special_surfaces: dict[str, str] | None = None,
) -> TokenizerModel:
    """A model with only special tokens and the 256 byte symbols; no merges.

    ``special_surfaces`` maps labels to surfaces; labels naming one of
    SPECIAL_ROLES become role assignments, other labels just register the
    surface as a special token.
    """
    from .normalization import BYTE_TO_SYMBOL

    normalization = normalization or NormalizationConfig()
    if special_surfaces is None:
        special_surfaces = dict(DEFAULT_SPECIAL_SURFACES)
    vocab: dict[str, int] = {}
    specials: dict[str, int] = {}
    roles: dict[str, int] = {}
    for label, surface in special_surfaces.items():
        if surface not in specials:
            i = len(vocab)
            vocab[text_to_symbols(surface)] = i
            specials[surface] = i
        if label in SPECIAL_ROLES:
            roles[label] = specials[surface]
    for sym in BYTE_TO_SYMBOL:
        if sym not in vocab:
            vocab[sym] = len(vocab)
    model = TokenizerModel(normalization=normalization, vocab=vocab, specials=specials, roles=roles)
    model.validate()
    return model


@dataclass(frozen=True)
class VocabReport:
    size: int
    special_count: int
    added_count: int
    longest_surface: str  # longest learned (non-added, non-special) surface
    per_length: dict[int, int]  # visible lengths 0..10 over the whole vocabulary
    overflow: int  # entries with visible length > 10


def vocab_report(model: TokenizerModel) -> VocabReport:
    """Exact size/added/special counts and a per-length histogram.

    Lengths are visible characters of the decoded surface, a single leading
    space excluded. The histogram covers the whole vocabulary; the longest
    surface is taken over learned tokens only, since added tokens (padding
    fillers in particular) are exempt from any length cap.
    """
    exempt = model.added_ids() | model.special_ids()
    per_length: Counter[int] = Counter()
    overflow = 0
    longest = ""
    longest_len = -1
    for tok, token_id in model.vocab.items():
        surface = symbols_to_text(tok)
        n = len(surface)
        if surface.startswith(" "):
            n -= 1
        if token_id not in exempt and n > longest_len:
            longest_len, longest = n, surface
        if n > 10:
            overflow += 1
        else:
            per_length[n] += 1
    return VocabReport(
        size=model.size,
        special_count=len(model.specials),
        added_count=len(model.added),
        longest_surface=longest,
        per_length=dict(sorted(per_length.items())),
        overflow=overflow,
    )
