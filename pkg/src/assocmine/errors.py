"""Exception hierarchy. ``exit_code`` is what the CLI returns for each family."""


class AssocMineError(Exception):
    exit_code = 1


class ParameterError(AssocMineError, ValueError):
    """Threshold or size parameter outside its allowed range."""


class SchemaError(AssocMineError):
    """Input file lacks a mapped column or field."""


class CorpusValidationError(AssocMineError):
    """A row violates a record invariant (duplicate id, empty text, bad int)."""


class ParseError(AssocMineError):
    """Malformed line or row in an input table."""


class EncodingError(AssocMineError):
    """Token missing from the vocabulary during encoding."""

    def __init__(self, token, row):
        super().__init__(f"token {token!r} in row {row} is not in the vocabulary")
        self.token = token
        self.row = row


class ConsistencyError(AssocMineError):
    """Internal invariant broken; points at a mining bug, not bad input."""

    exit_code = 3


class OracleRefusal(AssocMineError):
    """Brute-force enumeration asked to run on too large a vocabulary."""
