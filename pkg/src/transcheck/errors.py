"""Exception and warning types shared across the package."""


class TranscheckError(Exception):
    """Base class for all errors raised by this package."""


class InvalidInputError(TranscheckError, ValueError):
    """An argument violates an operation's precondition."""


class DegenerateVectorError(TranscheckError, ValueError):
    """A vector with zero norm was passed where a direction is required."""


class EmbeddingParseError(TranscheckError, ValueError):
    """An embedding file line could not be parsed (message carries file:line)."""


class InvalidSentenceError(TranscheckError, ValueError):
    """Input text is empty or cannot be tokenized."""


class InvalidTranslationError(TranscheckError, ValueError):
    """A translation handed to the consistency oracle is empty."""


class CalibrationError(TranscheckError, ValueError):
    """Threshold learning received degenerate labels (a single class)."""


class TrainingError(TranscheckError, ValueError):
    """Lexicon training received an empty or unusable parallel corpus."""


class GreyBoxUnavailableError(TranscheckError, RuntimeError):
    """Probability ranking requested but a candidate has no probability."""


class MapBackUnavailableError(TranscheckError, RuntimeError):
    """A replaced word has no aligned target span, so map-back cannot run."""


class TranslationError(TranscheckError, RuntimeError):
    """Base class for translator backend failures."""


class TransientTranslationError(TranslationError):
    """Timeout or transport failure that persisted through all retries."""


class PermanentTranslationError(TranslationError):
    """The backend rejected the request; retrying will not help."""


class MalformedResponseError(TranslationError):
    """The backend answered but the payload is unusable (e.g. empty output)."""


class ConfigError(TranscheckError, ValueError):
    """A run configuration references missing paths or illegal values."""


class DegenerateVectorWarning(UserWarning):
    """A weighted bag-of-words vector had zero norm; score forced to 0."""
