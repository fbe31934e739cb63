"""Brevity factor: normalized word count.

A term's brevity score is ``1 - word_count / max_word_count``, so the longest
term in a corpus scores exactly 0 and a one-word term scores just under 1.
"""

from __future__ import annotations

from dataclasses import dataclass

from .errors import ConceptGaugeError

# Longest concept name observed in the reference corpus; used when scoring a
# single term without corpus context.
DEFAULT_MAX_WORD_COUNT = 202


@dataclass(frozen=True)
class TokenizedTerm:
    tokens: tuple[str, ...]
    count: int


def tokenize(term: str) -> TokenizedTerm:
    """Split a term into words.

    Splits on whitespace (runs collapsed), drops tokens containing no letter
    or digit, and keeps hyphenated words as single tokens.
    """
    stripped = term.strip()
    if not stripped:
        raise ConceptGaugeError("cannot tokenize an empty term")
    tokens = tuple(t for t in stripped.split() if any(c.isalnum() for c in t))
    if not tokens:
        raise ConceptGaugeError(f"no word tokens in term {term!r}")
    return TokenizedTerm(tokens=tokens, count=len(tokens))


def word_count(term: str) -> int:
    return tokenize(term).count


def brevity_score(word_count: int, max_word_count: int = DEFAULT_MAX_WORD_COUNT) -> float:
    """Normalized word count in [0, 1]; strictly decreasing in word_count."""
    if max_word_count < 1:
        raise ConceptGaugeError(f"max_word_count must be >= 1, got {max_word_count}")
    if word_count < 1:
        raise ConceptGaugeError(f"word_count must be >= 1, got {word_count}")
    if word_count > max_word_count:
        raise ConceptGaugeError(
            f"word_count {word_count} exceeds max_word_count {max_word_count}"
        )
    return 1.0 - word_count / max_word_count
