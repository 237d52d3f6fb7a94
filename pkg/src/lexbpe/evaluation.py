"""Evaluation harness: corpus ingestion, compression metrics, term tables,
vocabulary size distributions, and error/correct alignment reports.

Tokens-per-character is kept as an exact rational so the identity
``tpc * char_count == total tokens`` holds before any display rounding.
Characters are counted on the raw, pre-normalization text and task-wrapper
specials are never added, which keeps cross-tokenizer comparisons fair;
both choices are recorded in the report metadata.
"""

from __future__ import annotations

import hashlib
import json
from collections import Counter
from dataclasses import dataclass, field
from fractions import Fraction
from pathlib import Path
from typing import Iterable, Mapping, Sequence

from .errors import CorpusError, LoadError
from .model import TokenizerModel
from .normalization import symbols_to_text
from .runtime import Tokenizer

METRIC_CONVENTIONS = {
    "characters": "Unicode scalar values of the raw document text, before normalization",
    "tokens": "encode() output; task-wrapper special tokens are not added or counted",
    "token_length": "characters of the decoded surface (U+FFFD for partial byte "
    "sequences), one leading space excluded",
}


@dataclass(frozen=True)
class Corpus:
    """A named document collection; ids and order are deterministic."""

    name: str
    documents: tuple[tuple[str, str], ...]

    @property
    def char_count(self) -> int:
        return sum(len(text) for _, text in self.documents)

    def __len__(self) -> int:
        return len(self.documents)


def corpus_from_texts(name: str, texts: Iterable[str]) -> Corpus:
    return Corpus(name, tuple((f"{name}:{i}", t) for i, t in enumerate(texts)))


def ingest_corpus(path_spec: str | Path, name: str | None = None) -> Corpus:
    """Read a directory of .txt files or a line-delimited records file.

    Directory documents are ordered by sorted relative path; records files
    need a "text" field per line. Errors carry the offending location.
    """
    path = Path(path_spec)
    if not path.exists():
        raise CorpusError(f"corpus path does not exist: {path}")
    name = name or path.stem
    documents: list[tuple[str, str]] = []
    if path.is_dir():
        for file in sorted(path.rglob("*.txt")):
            try:
                text = file.read_text(encoding="utf-8")
            except (OSError, UnicodeDecodeError) as exc:
                raise CorpusError(f"cannot read {file}: {exc}") from exc
            documents.append((str(file.relative_to(path)), text))
    else:
        try:
            raw = path.read_text(encoding="utf-8")
        except (OSError, UnicodeDecodeError) as exc:
            raise CorpusError(f"cannot read {path}: {exc}") from exc
        for lineno, line in enumerate(raw.splitlines(), start=1):
            if not line.strip():
                continue
            try:
                record = json.loads(line)
            except json.JSONDecodeError as exc:
                raise CorpusError(f"{path}:{lineno}: invalid record: {exc.msg}") from None
            if not isinstance(record, dict) or "text" not in record:
                raise CorpusError(f"{path}:{lineno}: record is missing the 'text' field")
            if not isinstance(record["text"], str):
                raise CorpusError(f"{path}:{lineno}: 'text' field is not a string")
            documents.append((f"{path.name}:{lineno}", record["text"]))
    return Corpus(name, tuple(documents))


def total_tokens(tokenizer: Tokenizer, corpus: Corpus) -> int:
    return sum(len(tokenizer.encode(text).ids) for _, text in corpus.documents)


def tokens_per_character(tokenizer: Tokenizer, corpus: Corpus) -> Fraction:
    """Exact token/character ratio; rendered at 4 decimal places."""
    if len(corpus) == 0:
        raise CorpusError(f"corpus {corpus.name!r} has no documents")
    chars = corpus.char_count
    if chars == 0:
        raise CorpusError(f"corpus {corpus.name!r} has zero characters")
    return Fraction(total_tokens(tokenizer, corpus), chars)


def total_token_counts(
    tokenizers: Mapping[str, Tokenizer], corpora: Sequence[Corpus]
) -> dict[tuple[str, str], int]:
    return {
        (mname, corpus.name): total_tokens(tok, corpus)
        for mname, tok in tokenizers.items()
        for corpus in corpora
    }


def term_token_table(
    tokenizers: Mapping[str, Tokenizer], terms: Sequence[tuple[str, str]]
) -> dict[tuple[str, str, str], int]:
    """Token count per (model, domain, term), each term encoded standalone."""
    return {
        (mname, domain, term): len(tok.encode(term).ids)
        for mname, tok in tokenizers.items()
        for domain, term in terms
    }


def term_table_averages(
    table: Mapping[tuple[str, str, str], int]
) -> dict[tuple[str, str], Fraction]:
    """Arithmetic mean per (model, domain) plus an overall mean of means."""
    groups: dict[tuple[str, str], list[int]] = {}
    for (mname, domain, _term), count in table.items():
        groups.setdefault((mname, domain), []).append(count)
    averages = {key: Fraction(sum(v), len(v)) for key, v in groups.items()}
    models = {m for m, _ in averages}
    for mname in models:
        domain_means = [v for (m, _), v in averages.items() if m == mname]
        averages[(mname, "overall")] = Fraction(
            sum(domain_means, Fraction(0)), len(domain_means)
        )
    return averages


@dataclass(frozen=True)
class SizeDistribution:
    """Vocabulary histogram by visible surface length."""

    counts: dict[int, int]
    total: int
    coverage: float = 1.0

    def count_le(self, hi: int) -> int:
        return sum(c for n, c in self.counts.items() if 1 <= n <= hi)

    def count_range(self, lo: int, hi: int) -> int:
        return sum(c for n, c in self.counts.items() if lo <= n <= hi)

    def count_over(self, lo: int) -> int:
        return sum(c for n, c in self.counts.items() if n > lo)

    def percentage(self, count: int) -> float:
        return round(100.0 * count / self.total, 1)


def token_size_distribution(model: TokenizerModel | Tokenizer) -> SizeDistribution:
    """Histogram of decoded surface lengths over the whole vocabulary.

    Lengths exclude one leading space; every entry is decodable here, so
    coverage is always 1.0 (kept for parity with partially decodable
    third-party vocabularies).
    """
    if isinstance(model, Tokenizer):
        model = model.model
    counts: Counter[int] = Counter()
    for tok in model.vocab:
        surface = symbols_to_text(tok)
        n = len(surface)
        if surface.startswith(" "):
            n -= 1
        counts[n] += 1
    return SizeDistribution(dict(sorted(counts.items())), model.size, 1.0)


@dataclass(frozen=True)
class AlignmentRow:
    model: str
    error_surfaces: tuple[str, ...]
    correct_surfaces: tuple[str, ...]
    shared: int

    @property
    def error_tokens(self) -> int:
        return len(self.error_surfaces)

    @property
    def correct_tokens(self) -> int:
        return len(self.correct_surfaces)


def error_alignment_report(
    tokenizers: Mapping[str, Tokenizer], pairs: Sequence[tuple[str, str]]
) -> list[AlignmentRow]:
    """Side-by-side tokenization of error/correct text pairs.

    ``shared`` is the multiset intersection size of the two surface lists.
    """
    if not pairs:
        raise CorpusError("alignment requires at least one (error, correct) pair")
    rows = []
    for mname, tok in tokenizers.items():
        for error_text, correct_text in pairs:
            err = tok.encode(error_text).surfaces
            cor = tok.encode(correct_text).surfaces
            shared = sum((Counter(err) & Counter(cor)).values())
            rows.append(AlignmentRow(mname, err, cor, shared))
    return rows


@dataclass
class EvalReport:
    """All evaluation tables produced by a run; unset sections stay empty."""

    tpc: dict[tuple[str, str], Fraction] = field(default_factory=dict)
    totals: dict[tuple[str, str], int] = field(default_factory=dict)
    char_counts: dict[str, int] = field(default_factory=dict)
    term_table: dict[tuple[str, str, str], int] = field(default_factory=dict)
    term_averages: dict[tuple[str, str], Fraction] = field(default_factory=dict)
    size_dist: dict[str, SizeDistribution] = field(default_factory=dict)
    alignment: list[AlignmentRow] = field(default_factory=list)
    metadata: dict[str, str] = field(default_factory=dict)

    def check_consistency(self) -> None:
        """Exact-rational check that tpc equals totals / characters."""
        for (mname, cname), ratio in self.tpc.items():
            total = self.totals.get((mname, cname))
            chars = self.char_counts.get(cname)
            if total is None or chars is None:
                raise CorpusError(f"report lacks totals for ({mname}, {cname})")
            if ratio * chars != total:
                raise CorpusError(
                    f"inconsistent report: tpc*chars != totals for ({mname}, {cname})"
                )


def build_tpc_report(
    tokenizers: Mapping[str, Tokenizer], corpora: Sequence[Corpus]
) -> EvalReport:
    report = EvalReport(metadata=dict(METRIC_CONVENTIONS))
    for corpus in corpora:
        report.char_counts[corpus.name] = corpus.char_count
    report.totals = total_token_counts(tokenizers, corpora)
    for (mname, cname), total in report.totals.items():
        report.tpc[(mname, cname)] = Fraction(total, report.char_counts[cname])
    report.check_consistency()
    return report


# ---------------------------------------------------------------------------
# Rendering

_SIZE_ROWS: tuple[tuple[str, str], ...] = tuple(
    [(str(n), str(n)) for n in range(1, 11)]
    + [("<=5", "le5"), ("6-10", "6to10"), ("<=10", "le10"), (">10", "over10")]
)


def _fmt_tpc(value: Fraction) -> str:
    return f"{float(value):.4f}"


def _fmt_avg(value: Fraction) -> str:
    return f"{float(value):.2f}"


def _size_cell(dist: SizeDistribution, key: str) -> str:
    if key == "le5":
        count = dist.count_le(5)
    elif key == "6to10":
        count = dist.count_range(6, 10)
    elif key == "le10":
        count = dist.count_le(10)
    elif key == "over10":
        count = dist.count_over(10)
    else:
        count = dist.counts.get(int(key), 0)
    return f"{dist.percentage(count):.1f}%"


def _report_tables(report: EvalReport) -> list[tuple[str, list[list[str]]]]:
    """Each table as (title, rows); the first row is the header."""
    tables: list[tuple[str, list[list[str]]]] = []

    if report.tpc:
        models = sorted({m for m, _ in report.tpc})
        corpora = list(dict.fromkeys(c for _, c in report.tpc))
        rows = [["Corpus", *models]]
        for cname in corpora:
            rows.append([cname, *[_fmt_tpc(report.tpc[(m, cname)]) for m in models]])
        tables.append(("Tokens per character", rows))

    if report.totals:
        models = sorted({m for m, _ in report.totals})
        corpora = list(dict.fromkeys(c for _, c in report.totals))
        rows = [["Corpus", *models]]
        for cname in corpora:
            rows.append([cname, *[str(report.totals[(m, cname)]) for m in models]])
        tables.append(("Total token counts", rows))

    if report.term_table:
        models = sorted({m for m, _, _ in report.term_table})
        terms = list(dict.fromkeys((d, t) for _, d, t in report.term_table))
        rows = [["Domain", "Term", *models]]
        for domain, term in terms:
            rows.append(
                [domain, term, *[str(report.term_table[(m, domain, term)]) for m in models]]
            )
        tables.append(("Domain term token counts", rows))

    if report.term_averages:
        models = sorted({m for m, _ in report.term_averages})
        domains = [d for d in dict.fromkeys(d for _, d in report.term_averages) if d != "overall"]
        rows = [["Tokenizer", *domains, "overall"]]
        for mname in models:
            rows.append(
                [
                    mname,
                    *[_fmt_avg(report.term_averages[(mname, d)]) for d in domains],
                    _fmt_avg(report.term_averages[(mname, "overall")]),
                ]
            )
        tables.append(("Average token count by domain", rows))

    if report.size_dist:
        models = list(report.size_dist)
        rows = [["Length", *models]]
        for label, key in _SIZE_ROWS:
            rows.append([label, *[_size_cell(report.size_dist[m], key) for m in models]])
        rows.append(
            ["coverage", *[f"{report.size_dist[m].coverage:.2f}" for m in models]]
        )
        tables.append(("Token size distribution (% of vocabulary)", rows))

    if report.alignment:
        rows = [["Tokenizer", "Error tokens", "Correct tokens", "Error count", "Correct count", "Shared"]]
        for row in report.alignment:
            rows.append(
                [
                    row.model,
                    json.dumps(list(row.error_surfaces), ensure_ascii=False),
                    json.dumps(list(row.correct_surfaces), ensure_ascii=False),
                    str(row.error_tokens),
                    str(row.correct_tokens),
                    str(row.shared),
                ]
            )
        tables.append(("Error/correct alignment", rows))

    return tables


def _csv_field(value: str) -> str:
    if any(ch in value for ch in ",\"\n\r"):
        return '"' + value.replace('"', '""') + '"'
    return value


def render_report(report: EvalReport, format: str = "markdown") -> bytes:
    """Deterministic, column-stable rendering of a report."""
    tables = _report_tables(report)
    lines: list[str] = []
    if format == "markdown":
        lines.append("# Evaluation report")
        lines.append("")
        for key, value in report.metadata.items():
            lines.append(f"- {key}: {value}")
        if report.metadata:
            lines.append("")
        for title, rows in tables:
            lines.append(f"## {title}")
            lines.append("")
            header, *data = rows
            lines.append("| " + " | ".join(header) + " |")
            lines.append("|" + "|".join("---" for _ in header) + "|")
            for row in data:
                lines.append("| " + " | ".join(cell.replace("|", "\\|") for cell in row) + " |")
            lines.append("")
    elif format == "csv":
        for key, value in report.metadata.items():
            lines.append(f"# {key}: {value}")
        for title, rows in tables:
            lines.append(f"# {title}")
            for row in rows:
                lines.append(",".join(_csv_field(cell) for cell in row))
    else:
        raise CorpusError(f"unknown report format: {format!r}")
    return ("\n".join(lines) + "\n").encode("utf-8")


# ---------------------------------------------------------------------------
# Term/pair list files and pinned-asset manifests


def read_terms_file(path: str | Path) -> list[tuple[str, str]]:
    """Lines of 'domain<TAB>term'; '#' comments and blank lines allowed."""
    p = Path(path)
    try:
        raw = p.read_text(encoding="utf-8")
    except OSError as exc:
        raise CorpusError(f"cannot read terms file {p}: {exc}") from exc
    out: list[tuple[str, str]] = []
    for lineno, line in enumerate(raw.splitlines(), start=1):
        if not line.strip() or line.startswith("#"):
            continue
        if "\t" not in line:
            raise CorpusError(f"{p}:{lineno}: expected 'domain<TAB>term'")
        domain, term = line.split("\t", 1)
        out.append((domain, term))
    return out


def read_pairs_file(path: str | Path) -> list[tuple[str, str]]:
    """Lines of 'error_text<TAB>correct_text' for alignment reports."""
    return read_terms_file(path)


def load_manifest(path: str | Path) -> dict[str, Path]:
    """Pinned-asset manifest: model name -> verified file path.

    The manifest maps names to a relative path and a sha256 content hash;
    hashes must match the file on disk.
    """
    p = Path(path)
    try:
        obj = json.loads(p.read_text(encoding="utf-8"))
    except OSError as exc:
        raise LoadError(f"cannot read manifest {p}: {exc}") from exc
    except json.JSONDecodeError as exc:
        raise LoadError(f"{p}: invalid JSON: {exc.msg}") from None
    models = obj.get("models")
    if not isinstance(models, dict):
        raise LoadError(f"{p}: manifest must contain a 'models' object")
    out: dict[str, Path] = {}
    for name, entry in models.items():
        file_path = (p.parent / entry["path"]).resolve()
        if not file_path.exists():
            raise LoadError(f"{p}: pinned file for {name!r} is missing: {file_path}")
        digest = hashlib.sha256(file_path.read_bytes()).hexdigest()
        if digest != entry.get("sha256"):
            raise LoadError(
                f"{p}: content hash mismatch for {name!r}: expected "
                f"{entry.get('sha256')}, found {digest}"
            )
        out[name] = file_path
    return out
