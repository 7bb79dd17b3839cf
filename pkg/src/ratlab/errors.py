"""Exception types shared across the package."""


class RatlabError(Exception):
    """Base class for all package errors."""


class ContractViolation(RatlabError):
    """A caller broke an operation's precondition or shape contract."""


class NumericError(RatlabError):
    """A computation produced NaN/Inf; the message names the offending op."""


class SequenceRangeError(RatlabError):
    """An index, length, or step is outside its declared range."""


class OracleError(RatlabError):
    """A test oracle detected a violated assumption (e.g. non-determinism)."""


class ConfigError(RatlabError):
    """A config file or config value is invalid; the message names the key."""


class DataError(RatlabError):
    """A dataset, record, or corpus file violates its schema."""


class RetrievalParseError(RatlabError):
    """A retrieval-call sentinel is present but malformed."""

    def __init__(self, message: str, offset: int):
        super().__init__(f"{message} (byte offset {offset})")
        self.offset = offset


class ClientError(RatlabError):
    """An annotation-client call failed after exhausting retries."""
