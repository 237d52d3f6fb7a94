"""Bit-exact save/load in the common tokenizer-JSON interchange format.

Files carry a BPE model block (vocab map plus ranked merges), an
added_tokens array, and normalizer / pre-tokenizer descriptors. Loading
accepts byte-level BPE files produced by other implementations; saving is
byte-deterministic for a fixed model.

Added tokens are written with raw-text content (what they match) while the
vocabulary is keyed in byte-symbol space, and this loader binds the two
through the byte remap. Other loaders of the format may instead assign
fresh ids to non-ASCII added content; the merge machinery itself behaves
identically everywhere.
"""

from __future__ import annotations

import json
from pathlib import Path

from .errors import LoadError, ModelError
from .model import MergeRule, TokenizerModel, infer_role
from .normalization import (
    PRETOKEN_PATTERN_PLAIN,
    NormalizationConfig,
    text_to_symbols,
)

FORMAT_VERSION = "1.0"


def _normalizer_descriptor(config: NormalizationConfig) -> dict | None:
    steps = []
    if config.unicode_form == "NFKC":
        steps.append({"type": "NFKC"})
    if config.uncased:
        steps.append({"type": "Lowercase"})
    if not steps:
        return None
    if len(steps) == 1:
        return steps[0]
    return {"type": "Sequence", "normalizers": steps}

def _pretokenizer_descriptor(config: NormalizationConfig) -> dict:
    byte_level = {
        "type": "ByteLevel",
        "add_prefix_space": False,
        "trim_offsets": True,
        "use_regex": config.space_prefix,
    }
    if config.space_prefix:
        return byte_level
    return {
        "type": "Sequence",
        "pretokenizers": [
            {
                "type": "Split",
                "pattern": {"Regex": PRETOKEN_PATTERN_PLAIN},
                "behavior": "Isolated",
                "invert": False,
            },
            byte_level,
        ],
    }


def saves(model: TokenizerModel) -> bytes:
    """Serialize to UTF-8 JSON bytes; deterministic for a fixed model."""
    model.validate()
    by_id = sorted(((i, tok) for tok, i in model.vocab.items()))
    specials = {i: s for s, i in model.specials.items()}
    added = {i: s for s, i in model.added.items()}
    added_entries = []
    for i in sorted(set(specials) | set(added)):
        surface = specials.get(i, added.get(i))
        added_entries.append(
            {
                "id": i,
                "content": surface,
                "single_word": False,
                "lstrip": False,
                "rstrip": False,
                # Non-special surfaces are matched against normalized text.
                "normalized": i not in specials,
                "special": i in specials,
            }
        )
    unknown_id = model.roles.get("unknown")
    obj = {
        "version": FORMAT_VERSION,
        "truncation": None,
        "padding": None,
        "added_tokens": added_entries,
        "normalizer": _normalizer_descriptor(model.normalization),
        "pre_tokenizer": _pretokenizer_descriptor(model.normalization),
        "post_processor": model.post_processor,
        "decoder": {
            "type": "ByteLevel",
            "add_prefix_space": True,
            "trim_offsets": True,
            "use_regex": True,
        },
        "model": {
            "type": "BPE",
            "dropout": None,
            "unk_token": specials.get(unknown_id) if unknown_id is not None else None,
            "continuing_subword_prefix": None,
            "end_of_word_suffix": None,
            "fuse_unk": False,
            "byte_fallback": False,
            "vocab": {tok: i for i, tok in by_id},
            "merges": [f"{r.left} {r.right}" for r in model.merges],
        },
    }
    return (json.dumps(obj, ensure_ascii=False, indent=2) + "\n").encode("utf-8")


def save(model: TokenizerModel, path: str | Path) -> None:
    Path(path).write_bytes(saves(model))


def _parse_normalizer(desc: dict | None) -> tuple[str, str]:
    """Map a normalizer descriptor to (unicode_form, case_mode)."""
    if desc is None:
        return "none", "cased"
    kind = desc.get("type")
    if kind == "NFKC":
        return "NFKC", "cased"
    if kind == "Lowercase":
        return "none", "uncased"
    if kind == "Sequence":
        forms = [_parse_normalizer(step) for step in desc.get("normalizers", [])]
        unicode_form = "NFKC" if any(f == "NFKC" for f, _ in forms) else "none"
        case_mode = "uncased" if any(c == "uncased" for _, c in forms) else "cased"
        unsupported = [
            step.get("type")
            for step in desc.get("normalizers", [])
            if step.get("type") not in ("NFKC", "Lowercase")
        ]
        if unsupported:
            raise LoadError(f"unsupported normalizer steps: {unsupported}")
        return unicode_form, case_mode
    raise LoadError(f"unsupported normalizer type: {kind!r}")


def _parse_pretokenizer(desc: dict | None) -> bool:
    """Map a pre-tokenizer descriptor to the space_prefix flag."""
    if desc is None:
        return True
    kind = desc.get("type")
    if kind == "ByteLevel":
        return bool(desc.get("use_regex", True))
    if kind == "Sequence":
        kinds = [p.get("type") for p in desc.get("pretokenizers", [])]
        if set(kinds) <= {"Split", "ByteLevel"}:
            byte_levels = [p for p in desc.get("pretokenizers", []) if p.get("type") == "ByteLevel"]
            if byte_levels and not byte_levels[-1].get("use_regex", True):
                return False
            return True
        raise LoadError(f"unsupported pre_tokenizer sequence: {kinds}")
    raise LoadError(f"unsupported pre_tokenizer type: {kind!r}")


def loads(data: bytes | str) -> TokenizerModel:
    """Parse a tokenizer file; structural problems raise LoadError."""
    try:
        obj = json.loads(data)
    except json.JSONDecodeError as exc:
        raise LoadError(f"not valid JSON: {exc.msg} (line {exc.lineno})") from None
    if not isinstance(obj, dict):
        raise LoadError("top-level JSON value must be an object")

    model_block = obj.get("model")
    if not isinstance(model_block, dict):
        raise LoadError("missing 'model' block")
    model_type = model_block.get("type")
    if model_type != "BPE":
        raise LoadError(f"unsupported model type: {model_type!r}")

    raw_vocab = model_block.get("vocab")
    if not isinstance(raw_vocab, dict):
        raise LoadError("model.vocab must be an object")
    vocab: dict[str, int] = {}
    seen_ids: set[int] = set()
    for tok, i in raw_vocab.items():
        if not isinstance(i, int):
            raise LoadError(f"vocab id for {tok!r} is not an integer")
        if i in seen_ids:
            raise LoadError(f"duplicate id {i} in vocabulary")
        seen_ids.add(i)
        vocab[tok] = i

    merges: list[MergeRule] = []
    raw_merges = model_block.get("merges", [])
    if not isinstance(raw_merges, list):
        raise LoadError("model.merges must be an array")
    for rank, entry in enumerate(raw_merges):
        if isinstance(entry, str):
            parts = entry.split(" ")
            if len(parts) != 2:
                raise LoadError(f"merge {rank}: expected 'left right', got {entry!r}")
            left, right = parts
        elif isinstance(entry, list) and len(entry) == 2:
            left, right = entry
        else:
            raise LoadError(f"merge {rank}: unsupported entry {entry!r}")
        merged = left + right
        for part in (left, right, merged):
            if part not in vocab:
                raise LoadError(f"merge {rank} references a token missing from vocab: {part!r}")
        merges.append(MergeRule(left, right, merged, rank))

    specials: dict[str, int] = {}
    added: dict[str, int] = {}
    raw_added = obj.get("added_tokens") or []
    if not isinstance(raw_added, list):
        raise LoadError("added_tokens must be an array")
    for entry in raw_added:
        surface = entry.get("content")
        entry_id = entry.get("id")
        if not isinstance(surface, str) or not isinstance(entry_id, int):
            raise LoadError(f"added token entry malformed: {entry!r}")
        sym = text_to_symbols(surface)
        existing = vocab.get(sym)
        if existing is None:
            if entry_id in seen_ids:
                raise LoadError(
                    f"added token {surface!r} id {entry_id} collides with a vocabulary id"
                )
            vocab[sym] = entry_id
            seen_ids.add(entry_id)
        elif existing != entry_id:
            raise LoadError(
                f"added token {surface!r} id {entry_id} disagrees with vocabulary id {existing}"
            )
        if entry.get("special"):
            specials[surface] = entry_id
        else:
            added[surface] = entry_id

    ids = sorted(vocab.values())
    if ids != list(range(len(ids))):
        raise LoadError("ids are not dense 0..size-1")

    roles: dict[str, int] = {}
    for surface, i in specials.items():
        role = infer_role(surface)
        if role is not None and role not in roles:
            roles[role] = i
    unk_surface = model_block.get("unk_token")
    if isinstance(unk_surface, str) and "unknown" not in roles:
        if unk_surface in specials:
            roles["unknown"] = specials[unk_surface]
        else:
            unk_id = vocab.get(text_to_symbols(unk_surface))
            if unk_id is not None:
                specials[unk_surface] = unk_id
                roles["unknown"] = unk_id

    normalization = NormalizationConfig(
        *_parse_normalizer(obj.get("normalizer")),
        space_prefix=_parse_pretokenizer(obj.get("pre_tokenizer")),
    )

    model = TokenizerModel(
        normalization=normalization,
        vocab=vocab,
        merges=tuple(merges),
        added=added,
        specials=specials,
        roles=roles,
        post_processor=obj.get("post_processor"),
    )
    try:
        model.validate()
    except ModelError as exc:
        raise LoadError(str(exc)) from None
    return model


def load(path: str | Path) -> TokenizerModel:
    p = Path(path)
    try:
        data = p.read_bytes()
    except OSError as exc:
        raise LoadError(f"cannot read tokenizer file {p}: {exc}") from exc
    return loads(data)
