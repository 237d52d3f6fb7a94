"""Trainer contracts: pair counting, selection, training, injection, padding."""

import random
import sys
from pathlib import Path

import pytest

sys.path.insert(0, str(Path(__file__).parent))

from oracle import brute_force_merge_sequence

from lexbpe import (
    CatalogSpec,
    NormalizationConfig,
    TokenCatalog,
    Tokenizer,
    TrainerConfig,
    TrainingError,
    assemble_catalog,
    base_model,
    count_pairs,
    inject_custom_tokens,
    pad_to_power_of_two,
    select_merge,
    train,
)
from lexbpe.errors import ConfigError
from lexbpe.normalization import symbols_to_text, text_to_symbols
from lexbpe.trainer import whitespace_filler_surfaces

NO_CATALOG = CatalogSpec(categories=(), include_space_variants=False)


def toy_config(target=512, min_freq=1, cap=None, catalog=NO_CATALOG, **kwargs):
    return TrainerConfig(
        target_vocab_size=target,
        min_pair_frequency=min_freq,
        max_token_chars=cap,
        catalog=catalog,
        **kwargs,
    )


def random_corpus(rng: random.Random, max_words=200, alphabet=10) -> list[str]:
    letters = "abcdefghij"[:alphabet]
    n_words = rng.randint(1, max_words)
    words = [
        "".join(rng.choice(letters) for _ in range(rng.randint(1, 8)))
        for _ in range(n_words)
    ]
    docs = []
    while words:
        take = rng.randint(1, 30)
        docs.append(" ".join(words[:take]))
        words = words[take:]
    return docs


class TestCountPairs:
    def test_direct_enumeration(self):
        stats = count_pairs({"aaab": 1})
        assert stats.counts == {("a", "a"): 2, ("a", "b"): 1}

    def test_weighted(self):
        stats = count_pairs({"low": 2, "lower": 1})
        assert stats.counts == {
            ("l", "o"): 3,
            ("o", "w"): 3,
            ("w", "e"): 1,
            ("e", "r"): 1,
        }

    def test_empty(self):
        assert count_pairs({}).counts == {}

    def test_total_mass(self):
        working = {"low": 2, "lower": 1, "a": 5}
        stats = count_pairs(working)
        expected = sum((len(w) - 1) * f for w, f in working.items())
        assert stats.total_mass() == expected


class TestSelectMerge:
    def test_tie_breaks_lexicographically(self):
        stats = count_pairs({"low": 3})  # (l,o) and (o,w) both count 3
        picked = select_merge(stats)
        assert picked == (("l", "o"), 3)

    def test_cap_excludes_long_merges(self):
        # ("at","es") merges to 4 visible chars
        stats = count_pairs({("at", "es"): 3})
        assert select_merge(stats, cap=3) is None
        assert select_merge(stats, cap=4) == (("at", "es"), 3)

    def test_min_frequency_threshold(self):
        stats = count_pairs({"ab": 1})
        assert select_merge(stats, min_frequency=2) is None

    def test_banned_and_blocked(self):
        stats = count_pairs({"ab": 9, "cd": 5})
        assert select_merge(stats, banned={("a", "b")}) == (("c", "d"), 5)
        assert select_merge(stats, blocked_surfaces={"ab"}) == (("c", "d"), 5)

    def test_space_marker_excluded_from_cap(self):
        space_the = (text_to_symbols(" t"), text_to_symbols("he"))
        stats = count_pairs({space_the: 2})
        assert select_merge(stats, cap=3) == (space_the, 2)


class TestTrainToy:
    def test_toy_merge_sequence(self):
        model = train(["low low lower"], toy_config(target=1024))
        pairs = [(m.left, m.right) for m in model.merges[:2]]
        assert pairs == [("l", "o"), ("lo", "w")]

    def test_empty_corpus_rejected(self):
        with pytest.raises(TrainingError, match="empty"):
            train([], toy_config())

    def test_infeasible_target_reports_minimum(self):
        config = TrainerConfig(target_vocab_size=256, catalog=NO_CATALOG)
        with pytest.raises(TrainingError, match="512"):
            train(["abc"], config)

    def test_deterministic_across_runs(self):
        docs = random_corpus(random.Random(5))
        a = train(docs, toy_config())
        b = train(docs, toy_config())
        assert a == b

    def test_exact_power_of_two_size(self):
        model = train(["tiny corpus"], toy_config(target=512))
        assert model.size == 512

    def test_rank_order_is_creation_order(self):
        docs = random_corpus(random.Random(6))
        model = train(docs, toy_config())
        created = set()
        for rule in model.merges:
            for part in (rule.left, rule.right):
                if len(part) > 1:
                    assert part in created, "merge references a later-created token"
            created.add(rule.merged)


class TestOracleEquivalence:
    def test_random_corpora_match_brute_force(self):
        rng = random.Random(42)
        for trial in range(12):
            docs = random_corpus(rng, max_words=80)
            config = toy_config(
                target=512, min_freq=rng.choice([1, 2]), cap=rng.choice([None, 3])
            )
            model = train(docs, config)
            skeleton = inject_custom_tokens(
                base_model(config.normalization), assemble_catalog(config)
            )
            expected = brute_force_merge_sequence(docs, config, skeleton)
            got = [(m.left, m.right) for m in model.merges]
            assert got == expected, f"trial {trial} diverged"

    def test_catalog_exclusion_from_stats(self):
        # corpus full of a catalog surface; its pieces never produce merges
        config = toy_config(
            target=2048,
            catalog=CatalogSpec(categories=("years",), include_space_variants=False),
        )
        model = train(["1776 1776 1776 1776"] * 10, config)
        year_sym = text_to_symbols("1776")
        assert all(rule.merged != year_sym for rule in model.merges)
        tok = Tokenizer(model)
        assert len(tok.encode("1776").ids) == 1


class TestInjection:
    def test_injected_token_encodes_atomically(self):
        model = base_model()
        catalog = TokenCatalog((("1776", "years"),))
        model = inject_custom_tokens(model, catalog)
        tok = Tokenizer(model)
        assert len(tok.encode("1776").ids) == 1

    def test_idempotent(self):
        catalog = TokenCatalog((("1776", "years"), ("(iv)", "enumerations")))
        once = inject_custom_tokens(base_model(), catalog)
        twice = inject_custom_tokens(once, catalog)
        assert once == twice

    def test_partial_surface_not_atomic(self):
        model = inject_custom_tokens(base_model(), TokenCatalog((("(iv)", "enumerations"),)))
        tok = Tokenizer(model)
        assert len(tok.encode("(iv)").ids) == 1
        assert len(tok.encode("(ivx)").ids) > 1


class TestPadding:
    def test_exact_fill(self):
        model = base_model()  # 263 entries
        padded = pad_to_power_of_two(model, 512)
        assert padded.size == 512
        assert len(padded.added) == 512 - model.size

    def test_exact_fill_from_4090(self):
        # size 4090 -> target 4096 appends exactly 6 fillers
        filler_count = 4090 - base_model().size
        catalog = TokenCatalog(
            tuple((f"tok{i}", "citations") for i in range(filler_count))
        )
        model = inject_custom_tokens(base_model(), catalog)
        assert model.size == 4090
        padded = pad_to_power_of_two(model, 4096)
        assert padded.size == 4096
        assert len(padded.added) - len(model.added) == 6

    def test_already_at_target(self):
        model = base_model()
        padded = pad_to_power_of_two(model, 512)
        again = pad_to_power_of_two(padded, 512)
        assert again == padded

    def test_target_below_size_rejected(self):
        model = base_model()
        with pytest.raises(TrainingError):
            pad_to_power_of_two(model, 256)

    def test_non_power_target_rejected(self):
        with pytest.raises(ConfigError):
            pad_to_power_of_two(base_model(), 300)

    def test_fillers_are_whitespace_and_fresh(self):
        model = base_model()
        padded = pad_to_power_of_two(model, 1024)
        new_surfaces = set(padded.added) - set(model.added)
        assert len(new_surfaces) == 1024 - model.size
        for surface in new_surfaces:
            assert set(surface) <= {" ", "\n", "\t"}
            assert text_to_symbols(surface) not in model.vocab

    def test_schedule_is_deterministic_and_phased(self):
        fillers = []
        gen = whitespace_filler_surfaces()
        for _ in range(500):
            fillers.append(next(gen))
        assert fillers[0] == " "
        assert fillers[127] == " " * 128
        assert fillers[128] == "\n"
        assert fillers[256] == "\t"
        assert fillers[384] == " \n"
        assert len(set(fillers)) == len(fillers)


class TestLengthCap:
    def test_cap_respected_on_trained_model(self):
        docs = random_corpus(random.Random(9), max_words=150)
        model = train(docs, toy_config(target=512, cap=3))
        added_ids = model.added_ids()
        special_ids = model.special_ids()
        for tok, i in model.vocab.items():
            if i in added_ids or i in special_ids:
                continue
            surface = symbols_to_text(tok)
            visible = len(surface) - (1 if surface.startswith(" ") else 0)
            if len(tok) > 1:  # learned tokens only; base symbols are exempt
                assert visible <= 3, f"{surface!r} exceeds the cap"
