"""Exception types shared across the package."""

from __future__ import annotations


class ConceptGaugeError(Exception):
    """Base class for all errors raised by this package."""


class MalformedRecordError(ConceptGaugeError):
    """An input record could not be parsed; carries the 1-based line number."""

    def __init__(self, line_no: int, message: str):
        super().__init__(f"line {line_no}: {message}")
        self.line_no = line_no


class EmptyCorpusError(ConceptGaugeError):
    """An operation that requires at least one concept received none."""


class CacheMissError(ConceptGaugeError):
    """A term was requested in offline mode but is absent from the cache."""

    def __init__(self, terms: list[str] | str):
        self.terms = [terms] if isinstance(terms, str) else list(terms)
        preview = ", ".join(repr(t) for t in self.terms[:5])
        more = "" if len(self.terms) <= 5 else f" (+{len(self.terms) - 5} more)"
        super().__init__(f"not in cache: {preview}{more}")


class ProviderError(ConceptGaugeError):
    """A live provider (HTTP service) failed after bounded retries."""


class DegenerateDataError(ConceptGaugeError):
    """Agreement is undefined for the given data (zero expected disagreement
    or fewer than two pairable values)."""
