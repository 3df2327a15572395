"""Exception hierarchy shared by all modules."""


class SparseExpandError(Exception):
    """Base class for all package errors."""


class DataError(SparseExpandError):
    """Malformed or inconsistent input data."""


class EmptyCorpusError(DataError):
    """An operation that requires at least one document got none."""


class DuplicateDocumentError(DataError):
    """Two documents share a doc_id."""


class UnknownFieldError(SparseExpandError):
    """A query or lookup referenced a field the index does not know."""


class AnalysisError(SparseExpandError):
    """A term did not analyze to exactly one token where one was required."""


class EmptyQueryError(SparseExpandError):
    """A topic title analyzed to zero tokens."""


class SeedNotFoundError(SparseExpandError):
    """A seed title did not resolve to a corpus document."""


class ConfigError(SparseExpandError):
    """Invalid pipeline configuration; carries the full error list."""

    def __init__(self, problems):
        self.problems = list(problems)
        super().__init__("; ".join(self.problems))
