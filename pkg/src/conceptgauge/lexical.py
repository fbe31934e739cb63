"""Dictionary-presence factor with grammatical-pattern scoring.

A term found verbatim in a medical dictionary scores 1.0.  Otherwise its
part-of-speech pattern is matched against a ranked table of combinations
(noun+noun best at 1.00, down to noun+noun+noun at 0.65); anything outside
the table falls back to 0.4.
"""

from __future__ import annotations

import logging
import os
from dataclasses import dataclass
from importlib import resources
from pathlib import Path
from typing import Callable, Protocol, Sequence

from .errors import ConceptGaugeError, ProviderError

logger = logging.getLogger(__name__)

NOUN = "NOUN"
ADJ = "ADJ"
VERB = "VERB"
ADV = "ADV"
PREP = "PREP"
DET = "DET"
OTHER = "OTHER"
ALL_TAGS = frozenset({NOUN, ADJ, VERB, ADV, PREP, DET, OTHER})

# Marker for "a preposition followed by at least one more token"; only valid
# as the final element of a pattern.
PREP_PHRASE = "PREP_PHRASE"

DEFAULT_PATTERN_SCORES: tuple[tuple[tuple[str, ...], float], ...] = (
    ((NOUN, NOUN), 1.00),
    ((ADJ, NOUN), 0.90),
    ((NOUN, PREP_PHRASE), 0.85),
    ((VERB, NOUN), 0.80),
    ((ADV, VERB), 0.75),
    ((ADJ, NOUN, NOUN), 0.70),
    ((NOUN, NOUN, NOUN), 0.65),
)

# Below the worst tabulated combination, above zero.
FALLBACK_PATTERN_SCORE = 0.4

PREPOSITIONS = frozenset({
    "in", "of", "on", "at", "by", "for", "with", "to", "from", "into",
    "onto", "under", "over", "within", "without", "during", "after",
    "before", "between", "among", "per", "via", "near", "against", "about",
    "across", "along", "around", "behind", "below", "beneath", "beside",
    "beyond", "through", "toward", "towards", "upon",
})

DETERMINERS = frozenset({
    "the", "a", "an", "this", "that", "these", "those", "each", "every",
    "any", "some", "no",
})

_ADJ_SUFFIXES = ("ic", "al", "ous", "ary")
_VERB_SUFFIXES = ("ize", "ate")


class DictionaryIndex:
    """Case-insensitive headword membership, file-backed or live."""

    def __init__(self, headwords: set[str], source: str = "file"):
        if source not in ("file", "live"):
            raise ConceptGaugeError(f"unknown dictionary source: {source}")
        self.headwords = {w.strip().lower() for w in headwords}
        self.source = source

    @classmethod
    def from_file(cls, path: str | Path) -> "DictionaryIndex":
        words = set()
        with open(path, encoding="utf-8") as f:
            for line in f:
                if line.strip():
                    words.add(line.strip())
        return cls(words, source="file")

    def __contains__(self, term: str) -> bool:
        return term.strip().lower() in self.headwords


class LiveDictionaryClient:
    """HTTP medical-dictionary lookup, keyed by MEDICAL_DICTIONARY_API_KEY.

    Presence means the API returns at least one full entry for the term.
    ``transport(term) -> bool`` is injectable for tests.
    """

    API_KEY_ENV_VAR = "MEDICAL_DICTIONARY_API_KEY"
    URL = "https://www.dictionaryapi.com/api/v3/references/medical/json/{term}"

    def __init__(self, transport: Callable[[str], bool] | None = None,
                 api_key: str | None = None, max_retries: int = 3):
        self.api_key = api_key or os.environ.get(self.API_KEY_ENV_VAR)
        self._transport = transport or self._default_transport
        self._max_retries = max_retries

    def _default_transport(self, term: str) -> bool:
        import requests

        resp = requests.get(self.URL.format(term=term),
                            params={"key": self.api_key or ""}, timeout=10)
        resp.raise_for_status()
        entries = resp.json()
        return bool(entries) and isinstance(entries[0], dict)

    def __contains__(self, term: str) -> bool:
        last: Exception | None = None
        for _ in range(self._max_retries):
            try:
                return self._transport(term.strip().lower())
            except Exception as exc:  # noqa: BLE001
                last = exc
        raise ProviderError(f"dictionary lookup failed for {term!r}: {last}")


def dictionary_presence(term: str, dictionary) -> bool:
    """True iff the full (lowercased, trimmed) term is a headword."""
    if not term.strip():
        raise ConceptGaugeError("empty term")
    return term in dictionary


class Tagger(Protocol):
    def tag(self, tokens: Sequence[str]) -> list[str]: ...


class RuleTagger:
    """Deterministic tagger: lexicon first, closed lists, suffix rules,
    default NOUN."""

    def __init__(self, lexicon: dict[str, str] | None = None):
        self.lexicon = {k.lower(): v for k, v in (lexicon or {}).items()}
        for tag in self.lexicon.values():
            if tag not in ALL_TAGS:
                raise ConceptGaugeError(f"unknown tag in lexicon: {tag}")

    @classmethod
    def default(cls) -> "RuleTagger":
        text = resources.files("conceptgauge.data").joinpath(
            "tag_lexicon.txt").read_text(encoding="utf-8")
        return cls(_parse_tag_lexicon(text.splitlines()))

    @classmethod
    def from_file(cls, path: str | Path) -> "RuleTagger":
        with open(path, encoding="utf-8") as f:
            return cls(_parse_tag_lexicon(f))

    def tag_word(self, word: str) -> str:
        w = word.lower()
        if w in self.lexicon:
            return self.lexicon[w]
        if w in PREPOSITIONS:
            return PREP
        if w in DETERMINERS:
            return DET
        if w.endswith("ly"):
            return ADV
        if w.endswith(_ADJ_SUFFIXES):
            return ADJ
        if w.endswith(_VERB_SUFFIXES):
            return VERB
        return NOUN

    def tag(self, tokens: Sequence[str]) -> list[str]:
        return [self.tag_word(t) for t in tokens]


def _parse_tag_lexicon(lines) -> dict[str, str]:
    lexicon: dict[str, str] = {}
    for line in lines:
        line = line.rstrip("\n")
        if not line.strip():
            continue
        word, _, tag = line.partition("\t")
        lexicon[word.strip()] = tag.strip()
    return lexicon


class PretaggedSource:
    """Tag provider backed by a TERM<TAB>TAG1 TAG2 ... file."""

    def __init__(self, path: str | Path):
        self.entries: dict[str, list[str]] = {}
        with open(path, encoding="utf-8") as f:
            for line in f:
                line = line.rstrip("\n")
                if not line.strip():
                    continue
                term, _, tags = line.partition("\t")
                self.entries[term.strip()] = tags.split()

    def tags_for(self, term: str) -> list[str] | None:
        return self.entries.get(term.strip())


def pos_tag(tokens: Sequence[str], tagger: Tagger | None = None) -> list[str]:
    """One tag per token; length always equals the token count."""
    if not tokens:
        raise ConceptGaugeError("cannot tag an empty token list")
    if tagger is None:
        tagger = RuleTagger.default()
    tags = tagger.tag(tokens)
    if len(tags) != len(tokens):
        raise ConceptGaugeError(
            f"tagger returned {len(tags)} tags for {len(tokens)} tokens")
    return tags


@dataclass(frozen=True)
class PatternScoreTable:
    entries: tuple[tuple[tuple[str, ...], float], ...] = DEFAULT_PATTERN_SCORES

    def __post_init__(self):
        for pattern, score in self.entries:
            if not 0.0 <= score <= 1.0:
                raise ConceptGaugeError(f"pattern score out of range: {score}")
            if PREP_PHRASE in pattern[:-1]:
                raise ConceptGaugeError(
                    "PREP_PHRASE is only valid as the final pattern element")


def _matches(pattern: tuple[str, ...], tags: Sequence[str]) -> bool:
    if pattern and pattern[-1] == PREP_PHRASE:
        head = pattern[:-1]
        # prefix tags, then a preposition with at least one token after it
        return (len(tags) >= len(head) + 2
                and list(tags[:len(head)]) == list(head)
                and tags[len(head)] == PREP)
    return list(tags) == list(pattern)


def pattern_score(tags: Sequence[str],
                  table: PatternScoreTable | None = None) -> float:
    """Score of the first matching table pattern; lone NOUN scores 1.0;
    no match falls back to 0.4."""
    if table is None:
        table = PatternScoreTable()
    for pattern, score in table.entries:
        if _matches(pattern, tags):
            return score
    if len(tags) == 1 and tags[0] == NOUN:
        return 1.0
    return FALLBACK_PATTERN_SCORE


def dp_score(present: bool, pattern: float) -> float:
    """Dictionary membership dominates; otherwise the pattern score stands."""
    if not 0.0 <= pattern <= 1.0:
        raise ConceptGaugeError(f"pattern score out of range: {pattern}")
    return 1.0 if present else pattern
