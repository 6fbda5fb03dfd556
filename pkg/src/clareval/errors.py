"""Exception hierarchy shared across the package.

The CLI maps these onto exit codes: configuration and validation
problems exit 1, malformed or unreadable input files exit 2.
"""


class ClarevalError(Exception):
    """Base class for package-specific errors."""


class SchemaError(ClarevalError):
    """An input document does not conform to its expected format."""


class PredictionFormatError(SchemaError):
    """A prediction file line could not be parsed, or a key repeats."""


class CorpusValidationError(ClarevalError):
    """A corpus failed strict validation."""

    def __init__(self, message: str, report=None):
        super().__init__(message)
        self.report = report


class ConfigError(ClarevalError):
    """Invalid rules file, synthesis config, or lexicon override."""


class IntegrityError(ClarevalError):
    """Cross-references between derived artifacts do not line up."""
