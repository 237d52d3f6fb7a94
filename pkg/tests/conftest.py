"""Shared fixtures: synthetic corpora and small trained models.

Corpora are generated deterministically into tests/_build (gitignored) and
reused across sessions; trained models are session-scoped because training
dominates suite runtime.
"""

from __future__ import annotations

import sys
from pathlib import Path

import pytest


def pytest_runtest_logreport(report):
    """One visible PASS/FAIL/SKIP line per acceptance criterion."""
    if "test_acceptance" not in report.nodeid:
        return
    name = report.nodeid.split("::")[-1]
    if report.when == "call" or (report.when == "setup" and report.skipped):
        status = "PASS" if report.passed else ("SKIP" if report.skipped else "FAIL")
        print(f"ACCEPTANCE {name}: {status}", file=sys.__stderr__, flush=True)

sys.path.insert(0, str(Path(__file__).parent))

from corpusgen import write_corpus  # noqa: E402

from lexbpe import CatalogSpec, NormalizationConfig, Tokenizer, TrainerConfig, train
from lexbpe.evaluation import ingest_corpus

BUILD_DIR = Path(__file__).parent / "_build"
FIXTURE_DIR = Path(__file__).parent / "fixtures"


@pytest.fixture(scope="session")
def build_dir() -> Path:
    BUILD_DIR.mkdir(exist_ok=True)
    return BUILD_DIR


@pytest.fixture(scope="session")
def legal_corpus_dir(build_dir: Path) -> Path:
    """~150 KB of synthetic legal/financial text (12 documents)."""
    return write_corpus(build_dir / "legal_small", "legal", 12, 12_000, seed=101)


@pytest.fixture(scope="session")
def legal_corpus_5mb_dir(build_dir: Path) -> Path:
    """The ~5 MB training fixture used by the length-cap acceptance run."""
    return write_corpus(build_dir / "legal_5mb", "legal", 40, 128_000, seed=202)


@pytest.fixture(scope="session")
def general_corpus_dir(build_dir: Path) -> Path:
    return write_corpus(build_dir / "general_small", "general", 12, 12_000, seed=303)


@pytest.fixture(scope="session")
def legal_corpus(legal_corpus_dir: Path):
    return ingest_corpus(legal_corpus_dir, name="legal-small")


@pytest.fixture(scope="session")
def legal_documents(legal_corpus) -> list[str]:
    return [text for _, text in legal_corpus.documents]


@pytest.fixture(scope="session")
def domain_config_small() -> TrainerConfig:
    return TrainerConfig(
        target_vocab_size=8192,
        catalog=CatalogSpec(max_enumeration=20),
        normalization=NormalizationConfig(),
    )


@pytest.fixture(scope="session")
def domain_model_small(legal_documents, domain_config_small):
    return train(legal_documents, domain_config_small)


@pytest.fixture(scope="session")
def domain_tokenizer_small(domain_model_small) -> Tokenizer:
    return Tokenizer(domain_model_small)


@pytest.fixture(scope="session")
def char_config_small() -> TrainerConfig:
    return TrainerConfig(
        target_vocab_size=2048,
        max_token_chars=3,
        catalog=CatalogSpec(categories=("whitespace",), include_space_variants=False),
    )


@pytest.fixture(scope="session")
def char_model_small(legal_documents, char_config_small):
    return train(legal_documents, char_config_small)


@pytest.fixture(scope="session")
def char_tokenizer_small(char_model_small) -> Tokenizer:
    return Tokenizer(char_model_small)


@pytest.fixture(scope="session")
def uncased_model_small(legal_documents):
    config = TrainerConfig(
        target_vocab_size=4096,
        catalog=CatalogSpec(max_enumeration=20),
        normalization=NormalizationConfig(case_mode="uncased"),
    )
    return train(legal_documents, config)


@pytest.fixture(scope="session")
def uncased_tokenizer_small(uncased_model_small) -> Tokenizer:
    return Tokenizer(uncased_model_small)
