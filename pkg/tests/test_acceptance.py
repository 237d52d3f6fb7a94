"""Acceptance criteria, one test per criterion.

Each test prints an "ACCEPTANCE <name>: PASS/FAIL/SKIP" line via the
conftest hook. The pinned-asset criteria need the published reference
tokenizers fetched and hash-pinned (scripts/fetch_assets.py writes
assets/manifest.json); they skip when the manifest is absent because this
toolkit never fetches at test time.
"""

import random
import sys
import time
from fractions import Fraction
from pathlib import Path

import pytest

sys.path.insert(0, str(Path(__file__).parent))

from corpusgen import write_corpus
from oracle import brute_force_merge_sequence

from lexbpe import (
    CatalogSpec,
    NormalizationConfig,
    Tokenizer,
    TrainerConfig,
    assemble_catalog,
    base_model,
    get_preset,
    inject_custom_tokens,
    load,
    normalize,
    train,
)
from lexbpe.evaluation import (
    build_tpc_report,
    corpus_from_texts,
    error_alignment_report,
    ingest_corpus,
    load_manifest,
    read_pairs_file,
    read_terms_file,
    term_table_averages,
    term_token_table,
    token_size_distribution,
    tokens_per_character,
    total_tokens,
)
from lexbpe.normalization import symbols_to_text, text_to_symbols

NO_CATALOG = CatalogSpec(categories=(), include_space_variants=False)
MANIFEST_PATH = Path(__file__).parent.parent / "assets" / "manifest.json"
FIXTURES = Path(__file__).parent / "fixtures"


def _pinned(name: str) -> Tokenizer:
    if not MANIFEST_PATH.exists():
        pytest.skip(
            f"pinned-asset manifest not present ({MANIFEST_PATH}); "
            "run scripts/fetch_assets.py on a networked machine"
        )
    models = load_manifest(MANIFEST_PATH)
    if name not in models:
        pytest.skip(f"model {name!r} is not pinned in {MANIFEST_PATH}")
    return Tokenizer(load(models[name]))


def _random_corpus(rng: random.Random, max_words: int = 200) -> list[str]:
    letters = "abcdefghij"
    words = [
        "".join(rng.choice(letters) for _ in range(rng.randint(1, 8)))
        for _ in range(rng.randint(1, max_words))
    ]
    docs = []
    while words:
        take = rng.randint(1, 30)
        docs.append(" ".join(words[:take]))
        words = words[take:]
    return docs


def _random_unicode_strings(n: int, seed: int) -> list[str]:
    rng = random.Random(seed)
    pools = (
        lambda: chr(rng.randint(0x20, 0x7E)),
        lambda: chr(rng.randint(0xA0, 0x2FF)),
        lambda: chr(rng.randint(0x370, 0x3FF)),
        lambda: chr(rng.randint(0x4E00, 0x9FFF)),
        lambda: chr(rng.randint(0x1F300, 0x1F64F)),
        lambda: rng.choice(" \t\n\r"),
        lambda: rng.choice("§¶“”‘’–—…"),
        lambda: chr(rng.randint(0x300, 0x36F)),
        lambda: chr(rng.randint(0x00, 0x1F)),
        lambda: rng.choice("ﬁﬂΩ℃№"),
    )
    return [
        "".join(rng.choice(pools)() for _ in range(rng.randint(0, 48)))
        for _ in range(n)
    ]


def test_trainer_oracle_equivalence():
    """50 random corpora: full merge sequence equals the brute-force trainer."""
    started = time.time()
    rng = random.Random(1234)
    for trial in range(50):
        docs = _random_corpus(rng)
        config = TrainerConfig(
            target_vocab_size=512,
            min_pair_frequency=rng.choice([1, 2]),
            max_token_chars=rng.choice([None, 3, 4]),
            catalog=NO_CATALOG,
        )
        model = train(docs, config)
        skeleton = inject_custom_tokens(
            base_model(config.normalization), assemble_catalog(config)
        )
        expected = brute_force_merge_sequence(docs, config, skeleton)
        got = [(rule.left, rule.right) for rule in model.merges]
        assert got == expected, f"trial {trial}: merge sequences diverge"
    elapsed = time.time() - started
    assert elapsed < 60, f"oracle equivalence took {elapsed:.1f}s (budget 60s)"


def test_char4k_length_cap_on_legal_fixture(legal_corpus_5mb_dir):
    """char-4k preset on the ~5 MB legal fixture: exact size, cap respected."""
    corpus = ingest_corpus(legal_corpus_5mb_dir)
    assert corpus.char_count >= 4_500_000, "training fixture shrank below ~5 MB"
    started = time.time()
    model = train((text for _, text in corpus.documents), get_preset("char-4k"))
    elapsed = time.time() - started
    assert model.size == 4096
    exempt = model.added_ids() | model.special_ids()
    for token, token_id in model.vocab.items():
        if token_id in exempt:
            continue
        surface = symbols_to_text(token)
        visible = len(surface) - (1 if surface.startswith(" ") else 0)
        assert visible <= 3, f"learned token {surface!r} exceeds the 3-character cap"
    assert elapsed < 300, f"char-4k training took {elapsed:.1f}s (budget 300s)"


def test_power_of_two_padding_on_random_early_stops():
    """20 random early-stop points: exact power-of-2 size, fresh whitespace fillers."""
    rng = random.Random(2024)
    padded_trials = 0
    for trial in range(20):
        docs = _random_corpus(rng, max_words=rng.randint(5, 120))
        target = rng.choice([512, 1024, 2048])
        config = TrainerConfig(
            target_vocab_size=target,
            min_pair_frequency=rng.choice([2, 3]),
            catalog=NO_CATALOG,
        )
        model = train(docs, config)
        assert model.size == target and target & (target - 1) == 0
        fillers = dict(model.added)  # catalog is empty: every added token is a filler
        if not fillers:
            continue
        padded_trials += 1
        filler_ids = sorted(fillers.values())
        assert filler_ids == list(range(target - len(fillers), target)), (
            "fillers must occupy the tail of the id space"
        )
        pre_padding = {tok for tok, i in model.vocab.items() if i < filler_ids[0]}
        for surface in fillers:
            assert set(surface) <= {" ", "\n", "\t"}, f"filler {surface!r} is not whitespace"
            assert text_to_symbols(surface) not in pre_padding, (
                f"filler {surface!r} collides with the pre-padding vocabulary"
            )
    assert padded_trials >= 15, "random corpora unexpectedly reached their targets"


def test_round_trip_suite(
    domain_tokenizer_small, uncased_tokenizer_small, legal_documents, general_corpus_dir
):
    """10,000 random Unicode strings plus all fixture documents round-trip
    exactly under both cased and uncased presets."""
    strings = _random_unicode_strings(10_000, seed=99)
    fixture_docs = list(legal_documents)
    fixture_docs += ["The court.", "Tax year 2023.", "a§b"]
    fixture_docs += [
        text for _, text in ingest_corpus(general_corpus_dir).documents
    ]
    fixture_docs += [
        (FIXTURES / "domain_terms.tsv").read_text(encoding="utf-8"),
        (FIXTURES / "error_pairs.tsv").read_text(encoding="utf-8"),
    ]
    failures = 0
    for tok in (domain_tokenizer_small, uncased_tokenizer_small):
        config = tok.model.normalization
        for s in strings:
            if tok.decode(tok.encode(s).ids) != normalize(s, config):
                failures += 1
        for doc in fixture_docs:
            if tok.decode(tok.encode(doc).ids) != normalize(doc, config):
                failures += 1
    assert failures == 0


def test_metric_self_consistency(
    domain_tokenizer_small, char_tokenizer_small, legal_corpus
):
    """tpc * char_count == totals exactly for every model; hand counts match."""
    tokenizers = {
        "base-cased": Tokenizer(base_model()),
        "base-uncased": Tokenizer(base_model(NormalizationConfig(case_mode="uncased"))),
        "domain-small": domain_tokenizer_small,
        "char-small": char_tokenizer_small,
    }
    tiny = corpus_from_texts("tiny", ["The court.", "Tax year 2023.", "a§b"])
    report = build_tpc_report(tokenizers, [legal_corpus, tiny])
    report.check_consistency()
    for (mname, cname), ratio in report.tpc.items():
        chars = report.char_counts[cname]
        assert ratio == Fraction(report.totals[(mname, cname)], chars)

    # Hand count: the base model emits one token per UTF-8 byte, so the three
    # tiny documents cost 10 + 14 + 4 = 28 tokens.
    assert report.totals[("base-cased", "tiny")] == 28


def test_pinned_term_table_reproduction():
    """Published 128K cased model reproduces the reference term counts."""
    tok = _pinned("kl3m-004-128k-cased")
    terms = read_terms_file(FIXTURES / "domain_terms.tsv")
    expected = {
        ("legal", "11 U.S.C. § 362(a)"): 6,
        ("legal", "res judicata"): 2,
        ("legal", "stare decisis"): 3,
        ("legal", "habeas corpus"): 2,
        ("legal", "certiorari"): 1,
        ("legal", "de novo review"): 3,
        ("legal", "28 C.F.R. § 14.2(a)"): 8,
        ("legal", "42 U.S.C. § 1983"): 5,
        ("legal", "Fed. R. Civ. P. 12(b)(6)"): 10,
        ("legal", "prima facie"): 2,
        ("financial", "EBITDA"): 1,
        ("financial", "P/E ratio"): 4,
        ("financial", "10-K filing"): 4,
        ("financial", "SEC Form 8-K"): 5,
        ("financial", "quarterly dividend"): 2,
        ("financial", "year-over-year growth"): 6,
        ("financial", "Basel III compliance"): 3,
        ("financial", "GAAP accounting"): 2,
        ("financial", "ROI analysis"): 2,
        ("financial", "market capitalization"): 2,
    }
    assert set(terms) == set(expected)
    table = term_token_table({"m": tok}, terms)
    for (domain, term), count in expected.items():
        assert table[("m", domain, term)] == count, (domain, term)
    averages = term_table_averages(table)
    assert float(averages[("m", "legal")]) == pytest.approx(4.20, abs=0.005)
    assert float(averages[("m", "financial")]) == pytest.approx(3.10, abs=0.005)
    assert float(averages[("m", "overall")]) == pytest.approx(3.65, abs=0.005)


def test_pinned_size_distribution_reproduction():
    """Published 128K cased model's length histogram within 0.1pp per bucket."""
    tok = _pinned("kl3m-004-128k-cased")
    dist = token_size_distribution(tok)
    reference = {1: 0.2, 2: 2.8, 3: 12.5, 4: 17.2, 5: 13.1,
                 6: 10.8, 7: 9.3, 8: 8.3, 9: 6.7, 10: 5.4}
    for bucket, expected_pct in reference.items():
        got = 100.0 * dist.counts.get(bucket, 0) / dist.total
        assert abs(got - expected_pct) <= 0.1, f"bucket {bucket}: {got:.2f} vs {expected_pct}"


def test_pinned_golden_rows():
    """Published models reproduce the reference surface sequences, before
    and after a save/load round trip."""
    from lexbpe import loads, saves

    cased = _pinned("kl3m-004-128k-cased")
    legal = cased.encode("Fed. R. Civ. P. 56(a)")
    assert list(legal.surfaces) == [
        "Fed.", " ", "R.", " ", "Civ.", " ", "P.", " 56", "(a)",
    ]
    financial = cased.encode("EBITDA increased by 14.3%")
    assert list(financial.surfaces) == [
        "EBITDA", " increased", " by", " 14", ".", "3", "%",
    ]
    resaved = Tokenizer(loads(saves(cased.model)))
    assert resaved.encode("Fed. R. Civ. P. 56(a)") == legal
    assert resaved.encode("EBITDA increased by 14.3%") == financial
    char4k = _pinned("kl3m-004-char-4k-cased")
    correct = char4k.encode("The United States Senate is responsible for the")
    assert list(correct.surfaces) == [
        "The", " Un", "it", "ed", " St", "at", "es", " S", "en", "ate",
        " is", " re", "sp", "ons", "ib", "le", " f", "or", " t", "he",
    ]


def test_pinned_directional_tpc(legal_corpus):
    """Published domain model beats a pinned 50K general baseline on legal text."""
    domain = _pinned("kl3m-004-128k-cased")
    baseline = _pinned("gpt2")
    assert tokens_per_character(domain, legal_corpus) < tokens_per_character(
        baseline, legal_corpus
    )


def test_desk_scale_directional_tpc(build_dir, legal_documents, general_corpus_dir):
    """Desk-scale substitute for the reference-corpus TPC comparison: a
    domain-trained tokenizer beats a general-trained one of equal size on
    held-out legal text."""
    heldout = ingest_corpus(
        write_corpus(build_dir / "legal_heldout", "legal", 6, 12_000, seed=404),
        name="legal-heldout",
    )
    general_docs = [
        text for _, text in ingest_corpus(general_corpus_dir).documents
    ]
    domain = Tokenizer(
        train(legal_documents, TrainerConfig(4096, catalog=CatalogSpec(max_enumeration=20)))
    )
    general = Tokenizer(train(general_docs, TrainerConfig(4096, catalog=NO_CATALOG)))
    tpc_domain = tokens_per_character(domain, heldout)
    tpc_general = tokens_per_character(general, heldout)
    assert tpc_domain < tpc_general


def test_error_alignment_rows_render(char_tokenizer_small):
    """Alignment rows exist for the bundled error/correct pairs and respect
    the char-preset cap."""
    pairs = read_pairs_file(FIXTURES / "error_pairs.tsv")
    rows = error_alignment_report({"char-small": char_tokenizer_small}, pairs)
    assert len(rows) == len(pairs)
    for row in rows:
        assert row.shared >= 1
        for surface in row.error_surfaces + row.correct_surfaces:
            visible = len(surface) - (1 if surface.startswith(" ") else 0)
            assert visible <= 3
