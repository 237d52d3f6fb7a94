"""Curated custom-token catalogs injected into vocabularies.

Nine categories of surfaces (whitespace runs, markup, years, small numbers,
Roman-numeral enumerations, citation abbreviations, ...) are generated or
loaded from versioned data files, deduplicated, and optionally duplicated
with a leading space so mid-sentence occurrences match atomically under
space-prefixed pre-tokenization.
"""

from __future__ import annotations

import json
import logging
import unicodedata
from dataclasses import dataclass
from importlib import resources
from pathlib import Path
from typing import TYPE_CHECKING

from .errors import CatalogError, ConfigError

if TYPE_CHECKING:
    from .trainer import TrainerConfig

logger = logging.getLogger(__name__)

CATEGORY_ORDER = (
    "whitespace",
    "markdown",
    "html",
    "json",
    "xml",
    "years",
    "numbers",
    "enumerations",
    "citations",
)

# Categories whose members behave like words and get a space-prefixed twin.
WORDLIKE_CATEGORIES = frozenset({"years", "numbers", "enumerations", "citations"})

YEAR_FIRST = 1776
YEAR_LAST = 2050
NUMBER_LAST = 999


@dataclass(frozen=True)
class CatalogSpec:
    """Which categories to assemble and with what parameters."""

    categories: tuple[str, ...] = CATEGORY_ORDER
    include_space_variants: bool = True
    max_whitespace_run: int = 4
    max_enumeration: int = 40
    citation_path: str | None = None

    def __post_init__(self) -> None:
        unknown = [c for c in self.categories if c not in CATEGORY_ORDER]
        if unknown:
            raise ConfigError(f"unknown catalog categories: {unknown}")
        if self.max_whitespace_run < 1:
            raise ConfigError("max_whitespace_run must be >= 1")


@dataclass(frozen=True)
class TokenCatalog:
    """Assembled, deduplicated catalog entries in deterministic order."""

    entries: tuple[tuple[str, str], ...] = ()
    include_space_variants: bool = True

    def surfaces(self) -> tuple[str, ...]:
        return tuple(s for s, _ in self.entries)

    def __len__(self) -> int:
        return len(self.entries)


def generate_years() -> list[str]:
    """Decimal year strings 1776 through 2050, ascending."""
    return [str(y) for y in range(YEAR_FIRST, YEAR_LAST + 1)]


def generate_numbers() -> list[str]:
    """Decimal strings 1 through 999, no leading zeros."""
    return [str(n) for n in range(1, NUMBER_LAST + 1)]


_ROMAN_STEPS = (
    (1000, "m"), (900, "cm"), (500, "d"), (400, "cd"),
    (100, "c"), (90, "xc"), (50, "l"), (40, "xl"),
    (10, "x"), (9, "ix"), (5, "v"), (4, "iv"), (1, "i"),
)


def roman_numeral(value: int) -> str:
    """Lowercase Roman numeral in standard subtractive notation."""
    if not 1 <= value <= 3999:
        raise ValueError(f"value out of Roman range: {value}")
    out = []
    for step, glyph in _ROMAN_STEPS:
        while value >= step:
            out.append(glyph)
            value -= step
    return "".join(out)


def generate_enumerations(max_value: int) -> list[str]:
    """Roman numerals 1..max_value, lower and upper case, plus "(i)" forms."""
    if not 1 <= max_value <= 100:
        raise ConfigError(f"max_value must be in 1..100, got {max_value}")
    lowers = [roman_numeral(n) for n in range(1, max_value + 1)]
    return lowers + [r.upper() for r in lowers] + [f"({r})" for r in lowers]


def generate_whitespace_runs(max_run: int) -> list[str]:
    """Runs of space/tab/newline/CR up to max_run, plus the CRLF pair."""
    if max_run < 1:
        raise ConfigError(f"max_run must be >= 1, got {max_run}")
    out = []
    for ch in (" ", "\t", "\n", "\r"):
        out.extend(ch * n for n in range(1, max_run + 1))
    out.append("\r\n")
    return out


def _parse_token_line(line: str, lineno: int, path: str) -> str:
    """One surface per line; JSON-quoted when it needs escaping."""
    if line.startswith('"'):
        try:
            value = json.loads(line)
        except json.JSONDecodeError as exc:
            raise CatalogError(f"{path}:{lineno}: bad quoted surface: {exc.msg}") from None
        if not isinstance(value, str):
            raise CatalogError(f"{path}:{lineno}: quoted surface is not a string")
        return value
    return line


def _format_token_line(surface: str) -> str:
    needs_quoting = (
        surface != surface.strip()
        or any(ch.isspace() for ch in surface)
        or surface.startswith(("#", '"', "["))
        or not surface.isprintable()
    )
    return json.dumps(surface, ensure_ascii=False) if needs_quoting else surface


def parse_catalog_file(text: str, path: str = "<catalog>") -> list[tuple[str, str | None]]:
    """Parse the line format: '#' comments, '[category]' headers, surfaces.

    Returns (surface, category) pairs; category is None before any header.
    """
    entries: list[tuple[str, str | None]] = []
    category: str | None = None
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.rstrip("\n")
        if not line.strip() or line.lstrip().startswith("#"):
            continue
        if line.startswith("[") and line.endswith("]"):
            category = line[1:-1].strip()
            if category not in CATEGORY_ORDER:
                raise CatalogError(f"{path}:{lineno}: unknown category {category!r}")
            continue
        surface = _parse_token_line(line, lineno, path)
        if not surface:
            raise CatalogError(f"{path}:{lineno}: empty surface")
        entries.append((surface, category))
    return entries


def _load_data_file(name: str) -> str:
    return resources.files("lexbpe.data").joinpath(name).read_text(encoding="utf-8")


def generate_markup_tokens() -> list[tuple[str, str]]:
    """Markdown/HTML/JSON/XML surfaces from the versioned data file."""
    entries = parse_catalog_file(_load_data_file("markup.txt"), "markup.txt")
    out = []
    for surface, category in entries:
        if category is None:
            raise CatalogError("markup.txt: surface before any [category] header")
        out.append((surface, category))
    return out


def load_citation_tokens(path: str | Path | None = None) -> list[str]:
    """Citation abbreviations from a file, or the embedded sample.

    The file holds one abbreviation per line ('#' comments allowed); an
    empty file yields an empty list with a warning, and an absent file
    falls back to the embedded sample.
    """
    if path is not None and not Path(path).exists():
        logger.warning("citation catalog %s not found; using the embedded sample", path)
        path = None
    if path is None:
        text = _load_data_file("citations.txt")
        label = "citations.txt"
    else:
        p = Path(path)
        try:
            text = p.read_text(encoding="utf-8")
        except OSError as exc:
            raise CatalogError(f"cannot read citation catalog {p}: {exc}") from exc
        label = str(p)
    surfaces = [s for s, _ in parse_catalog_file(text, label)]
    if not surfaces:
        logger.warning("citation catalog %s is empty", label)
    return surfaces


def _nfkc_stable(surface: str) -> bool:
    return unicodedata.normalize("NFKC", surface) == surface


def assemble_catalog(config: "TrainerConfig") -> TokenCatalog:
    """Union of the selected category generators, deduplicated.

    Order is the category order above, then generator order; a space-prefixed
    variant follows each word-like surface when enabled. Uncased presets
    lowercase surfaces before deduplication. Pure function of the config.
    """
    spec = config.catalog
    uncased = config.normalization.uncased

    generated: dict[str, list[str]] = {}
    if "whitespace" in spec.categories:
        generated["whitespace"] = generate_whitespace_runs(spec.max_whitespace_run)
    markup_needed = {"markdown", "html", "json", "xml"} & set(spec.categories)
    if markup_needed:
        for surface, category in generate_markup_tokens():
            if category in markup_needed:
                generated.setdefault(category, []).append(surface)
    if "years" in spec.categories:
        generated["years"] = generate_years()
    if "numbers" in spec.categories:
        generated["numbers"] = generate_numbers()
    if "enumerations" in spec.categories:
        generated["enumerations"] = generate_enumerations(spec.max_enumeration)
    if "citations" in spec.categories:
        generated["citations"] = load_citation_tokens(spec.citation_path)

    seen: set[str] = set()
    entries: list[tuple[str, str]] = []

    def add(surface: str, category: str) -> None:
        if uncased:
            surface = surface.lower()
        if not _nfkc_stable(surface):
            raise CatalogError(f"catalog surface not NFKC-stable: {surface!r} ({category})")
        if surface in seen:
            return
        seen.add(surface)
        entries.append((surface, category))

    for category in CATEGORY_ORDER:
        for surface in generated.get(category, []):
            add(surface, category)
            if spec.include_space_variants and category in WORDLIKE_CATEGORIES:
                add(" " + surface, category)

    return TokenCatalog(tuple(entries), spec.include_space_variants)


def export_catalog(catalog: TokenCatalog) -> str:
    """Serialize a catalog in the line format, grouped by category."""
    lines = []
    for category in CATEGORY_ORDER:
        members = [s for s, c in catalog.entries if c == category]
        if not members:
            continue
        lines.append(f"[{category}]")
        lines.extend(_format_token_line(s) for s in members)
        lines.append("")
    return "\n".join(lines)
