"""Named trainer configurations for the two tokenizer families.

The domain family targets 64K/128K vocabularies with the full custom-token
catalog; the character family caps merged-token length (3 characters for
the 4K/8K sizes, 4 for 16K) for error-correction workloads.
"""

from __future__ import annotations

from .catalog import CATEGORY_ORDER, CatalogSpec
from .errors import ConfigError
from .normalization import NormalizationConfig
from .trainer import TrainerConfig

DOMAIN_CATALOG = CatalogSpec(categories=CATEGORY_ORDER, include_space_variants=True)
CHAR_CATALOG = CatalogSpec(categories=("whitespace",), include_space_variants=False)


def _domain(target: int, case_mode: str) -> TrainerConfig:
    return TrainerConfig(
        target_vocab_size=target,
        catalog=DOMAIN_CATALOG,
        normalization=NormalizationConfig(case_mode=case_mode),
    )


def _char(target: int, cap: int) -> TrainerConfig:
    return TrainerConfig(
        target_vocab_size=target,
        max_token_chars=cap,
        catalog=CHAR_CATALOG,
        normalization=NormalizationConfig(),
    )


PRESETS: dict[str, TrainerConfig] = {
    "domain-64k": _domain(65536, "cased"),
    "domain-128k-cased": _domain(131072, "cased"),
    "domain-128k-uncased": _domain(131072, "uncased"),
    "char-4k": _char(4096, 3),
    "char-8k": _char(8192, 3),
    "char-16k": _char(16384, 4),
}


def get_preset(name: str) -> TrainerConfig:
    try:
        return PRESETS[name]
    except KeyError:
        raise ConfigError(
            f"unknown preset {name!r}; available: {', '.join(sorted(PRESETS))}"
        ) from None


_CONFIG_KEYS = {
    "target_vocab_size",
    "max_token_chars",
    "min_pair_frequency",
    "special_tokens",
    "normalization",
    "catalog",
}


def build_config(data: dict) -> TrainerConfig:
    """Build a TrainerConfig from a training-manifest dictionary.

    Keys mirror TrainerConfig fields one-to-one; an optional "preset" key
    names a base configuration that the remaining keys override.
    """
    from dataclasses import asdict

    d = dict(data)
    preset_name = d.pop("preset", None)
    base = get_preset(preset_name) if preset_name else None

    unknown = set(d) - _CONFIG_KEYS
    if unknown:
        raise ConfigError(f"unknown config keys: {sorted(unknown)}")
    if base is None and "target_vocab_size" not in d:
        raise ConfigError("config needs target_vocab_size (or a preset)")

    norm_kwargs = asdict(base.normalization) if base else asdict(NormalizationConfig())
    norm_kwargs.update(d.pop("normalization", {}))
    catalog_kwargs = asdict(base.catalog) if base else asdict(CatalogSpec())
    catalog_kwargs.update(d.pop("catalog", {}))
    if isinstance(catalog_kwargs.get("categories"), list):
        catalog_kwargs["categories"] = tuple(catalog_kwargs["categories"])

    kwargs = {
        "target_vocab_size": base.target_vocab_size if base else None,
        "max_token_chars": base.max_token_chars if base else None,
        "min_pair_frequency": base.min_pair_frequency if base else 2,
        "special_tokens": base.special_tokens if base else TrainerConfig.__dataclass_fields__["special_tokens"].default,
    }
    for key in ("target_vocab_size", "max_token_chars", "min_pair_frequency"):
        if key in d:
            kwargs[key] = d.pop(key)
    if "special_tokens" in d:
        kwargs["special_tokens"] = tuple(d.pop("special_tokens"))

    try:
        return TrainerConfig(
            normalization=NormalizationConfig(**norm_kwargs),
            catalog=CatalogSpec(**catalog_kwargs),
            **kwargs,
        )
    except TypeError as exc:
        raise ConfigError(f"invalid config: {exc}") from None
