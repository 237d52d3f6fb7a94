"""Command-line surface: train, encode, decode, inspect, catalog, eval-*.

Machine output (ids, decoded text, tables) goes to stdout; diagnostics go
to stderr. Exit codes: 0 success, 1 usage error, 2 data/config error.
Nothing in the pipeline is stochastic, so there is no seed flag.
"""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

from . import __version__
from .catalog import assemble_catalog, export_catalog
from .errors import LexbpeError
from .evaluation import (
    EvalReport,
    build_tpc_report,
    error_alignment_report,
    ingest_corpus,
    load_manifest,
    read_pairs_file,
    read_terms_file,
    render_report,
    term_table_averages,
    term_token_table,
    token_size_distribution,
)
from .model import vocab_report
from .presets import build_config, get_preset
from .runtime import Tokenizer
from .serialization import load, save
from .trainer import train


class _Parser(argparse.ArgumentParser):
    """argparse flavor whose usage errors exit with code 1."""

    def error(self, message: str) -> "None":  # type: ignore[override]
        self.print_usage(sys.stderr)
        self.exit(1, f"{self.prog}: error: {message}\n")


def _build_parser() -> _Parser:
    parser = _Parser(prog="lexbpe", description=__doc__)
    parser.add_argument("--version", action="version", version=f"lexbpe {__version__}")
    sub = parser.add_subparsers(dest="subcommand", required=True, parser_class=_Parser)

    p = sub.add_parser("train", help="train a tokenizer from a corpus")
    p.add_argument("--config", required=True, help="training manifest (JSON)")
    p.add_argument("--corpus", required=True, help="directory of .txt files or a records file")
    p.add_argument("--out", required=True, help="output tokenizer file")

    p = sub.add_parser("encode", help="encode text to ids")
    p.add_argument("--model", required=True)
    p.add_argument("--json", action="store_true", help="emit structured records")
    p.add_argument("text", nargs="*", help="texts to encode; stdin lines when omitted")

    p = sub.add_parser("decode", help="decode ids to text")
    p.add_argument("--model", required=True)
    p.add_argument("--json", action="store_true")
    p.add_argument("--skip-specials", action="store_true")
    p.add_argument("ids", nargs="*", help="token ids; stdin lines when omitted")

    p = sub.add_parser("inspect", help="report vocabulary statistics")
    p.add_argument("model", help="tokenizer file")
    p.add_argument("--json", action="store_true")

    p = sub.add_parser("catalog", help="export the assembled custom-token catalog")
    p.add_argument("--config", help="training manifest selecting the categories")
    p.add_argument("--out", help="output path (stdout when omitted)")

    for name, help_text in (
        ("eval-tpc", "tokens-per-character table"),
        ("eval-terms", "domain-term token counts"),
        ("eval-sizes", "vocabulary size distribution"),
        ("eval-align", "error/correct alignment rows"),
    ):
        p = sub.add_parser(name, help=help_text)
        p.add_argument("--model", action="append", default=[], help="tokenizer file (repeatable)")
        p.add_argument("--manifest", help="pinned-asset manifest adding named models")
        p.add_argument("--format", choices=("markdown", "csv"), default="markdown")
        if name == "eval-tpc":
            p.add_argument("--corpus", action="append", required=True, help="corpus path (repeatable)")
        if name in ("eval-terms", "eval-align"):
            p.add_argument("--terms", required=True, help="TSV input file")

    return parser


def _load_tokenizers(args: argparse.Namespace) -> dict[str, Tokenizer]:
    tokenizers: dict[str, Tokenizer] = {}
    for path in args.model:
        tokenizers[Path(path).stem] = Tokenizer(load(path))
    if args.manifest:
        for name, path in load_manifest(args.manifest).items():
            tokenizers[name] = Tokenizer(load(path))
    if not tokenizers:
        raise LexbpeError("no models given: pass --model and/or --manifest")
    return tokenizers


def _read_config(path: str) -> dict:
    try:
        return json.loads(Path(path).read_text(encoding="utf-8"))
    except OSError as exc:
        raise LexbpeError(f"cannot read config {path}: {exc}") from exc
    except json.JSONDecodeError as exc:
        raise LexbpeError(f"{path}: invalid JSON: {exc.msg} (line {exc.lineno})") from None


def _input_lines(values: list[str]) -> list[str]:
    if values:
        return values
    return [line.rstrip("\n") for line in sys.stdin]


def _cmd_train(args: argparse.Namespace) -> int:
    config = build_config(_read_config(args.config))
    corpus = ingest_corpus(args.corpus)
    model = train((text for _, text in corpus.documents), config)
    save(model, args.out)
    print(
        f"trained {model.size} tokens ({len(model.merges)} merges, "
        f"{len(model.added)} added, {len(model.specials)} special) -> {args.out}",
        file=sys.stderr,
    )
    return 0


def _cmd_encode(args: argparse.Namespace) -> int:
    tokenizer = Tokenizer(load(args.model))
    for text in _input_lines(args.text):
        result = tokenizer.encode(text)
        if args.json:
            record = {
                "ids": list(result.ids),
                "surfaces": list(result.surfaces),
                "offsets": [list(span) for span in result.offsets],
            }
            print(json.dumps(record, ensure_ascii=False))
        else:
            print(" ".join(str(i) for i in result.ids))
    return 0


def _cmd_decode(args: argparse.Namespace) -> int:
    tokenizer = Tokenizer(load(args.model))
    if args.ids:
        lines = [" ".join(args.ids)]
    else:
        lines = _input_lines([])
    for line in lines:
        try:
            ids = [int(part) for part in line.split()]
        except ValueError as exc:
            raise LexbpeError(f"ids must be integers: {exc}") from None
        text = tokenizer.decode(ids, skip_specials=args.skip_specials)
        if args.json:
            print(json.dumps({"text": text}, ensure_ascii=False))
        else:
            print(text)
    return 0


def _cmd_inspect(args: argparse.Namespace) -> int:
    model = load(args.model)
    report = vocab_report(model)
    power = report.size & (report.size - 1) == 0
    if args.json:
        print(
            json.dumps(
                {
                    "size": report.size,
                    "power_of_two": power,
                    "specials": report.special_count,
                    "added": report.added_count,
                    "merges": len(model.merges),
                    "longest_surface": report.longest_surface,
                    "per_length": report.per_length,
                    "overflow": report.overflow,
                },
                ensure_ascii=False,
            )
        )
        return 0
    print(f"size: {report.size} (power of 2: {'yes' if power else 'no'})")
    print(f"specials: {report.special_count}")
    print(f"added: {report.added_count}")
    print(f"merges: {len(model.merges)}")
    print(f"longest surface: {report.longest_surface!r}")
    for length, count in report.per_length.items():
        print(f"length {length}: {count}")
    print(f"length >10: {report.overflow}")
    return 0


def _cmd_catalog(args: argparse.Namespace) -> int:
    if args.config:
        config = build_config(_read_config(args.config))
    else:
        config = get_preset("domain-128k-cased")
    text = export_catalog(assemble_catalog(config))
    if args.out:
        Path(args.out).write_text(text, encoding="utf-8")
    else:
        sys.stdout.write(text)
    return 0


def _emit(report: EvalReport, fmt: str) -> int:
    sys.stdout.buffer.write(render_report(report, fmt))
    sys.stdout.buffer.flush()
    return 0


def _cmd_eval_tpc(args: argparse.Namespace) -> int:
    tokenizers = _load_tokenizers(args)
    corpora = [ingest_corpus(path) for path in args.corpus]
    return _emit(build_tpc_report(tokenizers, corpora), args.format)


def _cmd_eval_terms(args: argparse.Namespace) -> int:
    tokenizers = _load_tokenizers(args)
    terms = read_terms_file(args.terms)
    report = EvalReport()
    report.term_table = term_token_table(tokenizers, terms)
    report.term_averages = term_table_averages(report.term_table)
    return _emit(report, args.format)


def _cmd_eval_sizes(args: argparse.Namespace) -> int:
    tokenizers = _load_tokenizers(args)
    report = EvalReport()
    for name, tok in tokenizers.items():
        report.size_dist[name] = token_size_distribution(tok)
    return _emit(report, args.format)


def _cmd_eval_align(args: argparse.Namespace) -> int:
    tokenizers = _load_tokenizers(args)
    pairs = read_pairs_file(args.terms)
    report = EvalReport()
    report.alignment = error_alignment_report(tokenizers, pairs)
    return _emit(report, args.format)


_COMMANDS = {
    "train": _cmd_train,
    "encode": _cmd_encode,
    "decode": _cmd_decode,
    "inspect": _cmd_inspect,
    "catalog": _cmd_catalog,
    "eval-tpc": _cmd_eval_tpc,
    "eval-terms": _cmd_eval_terms,
    "eval-sizes": _cmd_eval_sizes,
    "eval-align": _cmd_eval_align,
}


def main(argv: list[str] | None = None) -> int:
    parser = _build_parser()
    args = parser.parse_args(argv)
    try:
        return _COMMANDS[args.subcommand](args)
    except LexbpeError as exc:
        print(f"lexbpe: error: {exc}", file=sys.stderr)
        return 2


def entrypoint() -> None:
    sys.exit(main())


if __name__ == "__main__":
    entrypoint()
