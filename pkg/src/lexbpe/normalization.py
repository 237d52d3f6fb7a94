"""Unicode normalization, byte-to-symbol remapping, and pre-tokenization.

Raw text is normalized (NFKC, optional lowercasing), then split into pieces
at word/space/punctuation boundaries, and each piece's UTF-8 bytes are
remapped to printable symbols so that every byte sequence has an exact,
invertible string representation.
"""

from __future__ import annotations

import unicodedata
from dataclasses import dataclass

import regex

from .errors import ConfigError

# Splitting pattern for space-prefixed pieces: contraction suffixes, letter
# runs, digit runs and punctuation runs each absorb one preceding space;
# whitespace runs keep everything except a space claimed by the next run.
PRETOKEN_PATTERN_SPACE_PREFIX = (
    r"""'(?:[sdmt]|ll|ve|re)| ?\p{L}+| ?\p{N}+| ?[^\s\p{L}\p{N}]+|\s+(?!\S)|\s+"""
)

# Variant without space adherence: a space run is its own piece.
PRETOKEN_PATTERN_PLAIN = (
    r"""'(?:[sdmt]|ll|ve|re)|\p{L}+|\p{N}+|[^\s\p{L}\p{N}]+|\s+(?!\S)|\s+"""
)

_RE_SPACE_PREFIX = regex.compile(PRETOKEN_PATTERN_SPACE_PREFIX)
_RE_PLAIN = regex.compile(PRETOKEN_PATTERN_PLAIN)

UNICODE_FORMS = ("NFKC", "none")
CASE_MODES = ("cased", "uncased")


@dataclass(frozen=True)
class NormalizationConfig:
    """How raw text is canonicalized before tokenization.

    ``space_prefix`` controls whether a single leading space adheres to the
    following word piece (the marker-prefixed style) or spaces stand alone.
    """

    unicode_form: str = "NFKC"
    case_mode: str = "cased"
    space_prefix: bool = True

    def __post_init__(self) -> None:
        if self.unicode_form not in UNICODE_FORMS:
            raise ConfigError(f"unicode_form must be one of {UNICODE_FORMS}, got {self.unicode_form!r}")
        if self.case_mode not in CASE_MODES:
            raise ConfigError(f"case_mode must be one of {CASE_MODES}, got {self.case_mode!r}")

    @property
    def uncased(self) -> bool:
        return self.case_mode == "uncased"


def normalize(text: str, config: NormalizationConfig) -> str:
    """Apply Unicode normalization, then lowercasing when uncased.

    Idempotent: ``normalize(normalize(s)) == normalize(s)``.
    """
    if config.unicode_form == "NFKC":
        text = unicodedata.normalize("NFKC", text)
    if config.uncased:
        text = text.lower()
    return text


def _build_byte_symbol_table() -> tuple[str, ...]:
    """The canonical bijection from the 256 byte values to printable symbols.

    Printable ASCII (except space) and printable Latin-1 map to themselves;
    the remaining byte values are assigned consecutive code points starting
    at U+0100 so every symbol is a single printable character.
    """
    keep = (
        list(range(ord("!"), ord("~") + 1))
        + list(range(0xA1, 0xAC + 1))
        + list(range(0xAE, 0xFF + 1))
    )
    table: dict[int, str] = {b: chr(b) for b in keep}
    next_cp = 256
    for b in range(256):
        if b not in table:
            table[b] = chr(next_cp)
            next_cp += 1
    return tuple(table[b] for b in range(256))


BYTE_TO_SYMBOL: tuple[str, ...] = _build_byte_symbol_table()
SYMBOL_TO_BYTE: dict[str, int] = {s: b for b, s in enumerate(BYTE_TO_SYMBOL)}

# The symbol the space byte maps to; a leading one marks a space-adhered piece.
SPACE_MARKER = BYTE_TO_SYMBOL[0x20]
NEWLINE_SYMBOL = BYTE_TO_SYMBOL[0x0A]
TAB_SYMBOL = BYTE_TO_SYMBOL[0x09]


def byte_remap(data: bytes) -> str:
    """Map a byte sequence to its printable symbol string."""
    return "".join(BYTE_TO_SYMBOL[b] for b in data)


def inverse_byte_remap(symbols: str) -> bytes:
    """Exact inverse of :func:`byte_remap`.

    Raises ``ValueError`` for characters outside the 256-symbol alphabet.
    """
    try:
        return bytes(SYMBOL_TO_BYTE[ch] for ch in symbols)
    except KeyError as exc:
        raise ValueError(f"not a byte symbol: {exc.args[0]!r}") from None


def text_to_symbols(text: str) -> str:
    """UTF-8 encode then remap; the working alphabet of training and encoding."""
    return byte_remap(text.encode("utf-8"))


def symbols_to_text(symbols: str) -> str:
    """Inverse remap then UTF-8 decode; incomplete sequences become U+FFFD."""
    return inverse_byte_remap(symbols).decode("utf-8", errors="replace")


def token_char_length(symbols: str, exclude_space_marker: bool = True) -> int:
    """Character length of a token surface given as a symbol string.

    Counts the Unicode scalar values that *start* inside the token's byte
    sequence (i.e. non-continuation UTF-8 bytes), which is additive across
    merges. A single leading space is excluded when requested so that
    space-adhered word tokens measure their visible length.
    """
    data = inverse_byte_remap(symbols)
    n = sum(1 for b in data if b & 0xC0 != 0x80)
    if exclude_space_marker and data[:1] == b" ":
        n -= 1
    return n


@dataclass(frozen=True)
class Piece:
    """One pre-tokenized span: remapped symbols plus its character span."""

    symbols: str
    start: int
    char_length: int

    @property
    def surface(self) -> str:
        return symbols_to_text(self.symbols)


def pretokenize(text: str, config: NormalizationConfig) -> list[Piece]:
    """Split normalized text into pieces using the pinned pattern.

    The concatenation of the pieces' surfaces reconstructs the input exactly.
    """
    pat = _RE_SPACE_PREFIX if config.space_prefix else _RE_PLAIN
    pieces = []
    for m in pat.finditer(text):
        chunk = m.group(0)
        pieces.append(Piece(text_to_symbols(chunk), m.start(), len(chunk)))
    return pieces
