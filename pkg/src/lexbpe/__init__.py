"""Domain-specific byte-level BPE tokenizers for legal and financial text.

Trains, runs, serializes, and evaluates BPE tokenizers with curated-token
injection, NFKC normalization, merged-token length caps, and power-of-2
vocabulary padding.
"""

from .catalog import CatalogSpec, TokenCatalog, assemble_catalog
from .errors import (
    CatalogError,
    ConfigError,
    CorpusError,
    DecodeError,
    LexbpeError,
    LoadError,
    ModelError,
    TrainingError,
)
from .evaluation import (
    Corpus,
    EvalReport,
    ingest_corpus,
    render_report,
    token_size_distribution,
    tokens_per_character,
    total_token_counts,
)
from .model import MergeRule, TokenizerModel, base_model, vocab_report
from .normalization import NormalizationConfig, normalize, pretokenize
from .presets import PRESETS, build_config, get_preset
from .runtime import EncodeResult, Tokenizer
from .serialization import load, loads, save, saves
from .trainer import (
    TrainerConfig,
    count_pairs,
    inject_custom_tokens,
    pad_to_power_of_two,
    select_merge,
    train,
)

__version__ = "0.1.0"

__all__ = [
    "CatalogError",
    "CatalogSpec",
    "ConfigError",
    "Corpus",
    "CorpusError",
    "DecodeError",
    "EncodeResult",
    "EvalReport",
    "LexbpeError",
    "LoadError",
    "MergeRule",
    "ModelError",
    "NormalizationConfig",
    "PRESETS",
    "TokenCatalog",
    "TokenizerModel",
    "Tokenizer",
    "TrainerConfig",
    "TrainingError",
    "assemble_catalog",
    "base_model",
    "build_config",
    "count_pairs",
    "get_preset",
    "ingest_corpus",
    "inject_custom_tokens",
    "load",
    "loads",
    "normalize",
    "pad_to_power_of_two",
    "pretokenize",
    "render_report",
    "save",
    "saves",
    "select_merge",
    "token_size_distribution",
    "tokens_per_character",
    "total_token_counts",
    "train",
    "vocab_report",
]
