"""Exception hierarchy shared across the package."""


class LexbpeError(Exception):
    """Base class for all errors raised by this package."""


class ConfigError(LexbpeError):
    """Invalid trainer or normalization configuration."""


class CorpusError(LexbpeError):
    """Corpus path is unreadable or a record is malformed."""


class CatalogError(LexbpeError):
    """Custom-token catalog file could not be parsed."""


class TrainingError(LexbpeError):
    """Training preconditions violated (empty corpus, infeasible target)."""


class ModelError(LexbpeError):
    """A tokenizer model violates a structural invariant."""


class LoadError(ModelError):
    """A serialized tokenizer file is malformed or unsupported."""


class DecodeError(LexbpeError):
    """An id sequence passed to decode is out of range."""
