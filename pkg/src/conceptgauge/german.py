"""German-mappability factor.

A term that maps into a compact German equivalent (ideally a single compound
noun) scores high.  The base score depends on how the translated word count
compares with the source word count, with different rules per source-length
band; a detected compound earns a +0.1 reward capped at 1.0.

Band rules (source word count -> base score):

    1-3 words:   translated <= source -> 1.0; == source+1 -> 0.8; >= source+2 -> 0.5
    4-6 words:   translated <  source -> 1.0; == source   -> 0.8; >  source   -> 0.5
    7-20 words:  translated <= 0.8*source -> 0.9; < source -> 0.7; >= source -> 0.4
    >= 21 words: translated <= 0.8*source -> 0.7; otherwise -> 0.4

The 20%-fewer comparisons are done in integers (5*translated <= 4*source) so
no float boundary can flip a band.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass
from importlib import resources
from pathlib import Path
from typing import Callable, Protocol

from .brevity import tokenize
from .errors import CacheMissError, ConceptGaugeError, ProviderError

logger = logging.getLogger(__name__)

DEFAULT_LINKING_ELEMENTS = ("s", "n", "es", "en", "e", "")


@dataclass(frozen=True)
class TranslationRecord:
    source_term: str
    source_word_count: int
    translated_term: str
    translated_word_count: int
    has_compound: bool


@dataclass(frozen=True)
class CompoundLexicon:
    """German stems plus the linking elements allowed between them."""

    stems: frozenset[str]
    linking_elements: tuple[str, ...] = DEFAULT_LINKING_ELEMENTS

    def __post_init__(self):
        if not self.stems:
            raise ConceptGaugeError("compound lexicon needs at least one stem")
        for stem in self.stems:
            if len(stem) < 3:
                raise ConceptGaugeError(f"stem too short (min 3 chars): {stem!r}")

    @classmethod
    def default(cls) -> "CompoundLexicon":
        text = resources.files("conceptgauge.data").joinpath(
            "german_stems.txt").read_text(encoding="utf-8")
        return cls(stems=frozenset(
            line.strip().lower() for line in text.splitlines() if line.strip()))

    @classmethod
    def from_file(cls, path: str | Path) -> "CompoundLexicon":
        stems = frozenset(
            line.strip().lower()
            for line in Path(path).read_text(encoding="utf-8").splitlines()
            if line.strip())
        return cls(stems=stems)


def detect_compound(token: str, lexicon: CompoundLexicon) -> bool:
    """True iff the token splits into >= 2 stems, with at most one linking
    element between adjacent stems.

    Longest-stem-first search with backtracking; the whole token must be
    consumed and it must both start and end on a stem.
    """
    if not token:
        raise ConceptGaugeError("empty token")
    word = token.lower()
    n = len(word)
    max_stem = max(len(s) for s in lexicon.stems)
    links = lexicon.linking_elements

    # reachable[i] answers: starting at i, can we consume >=1 stem
    # (plus optional links) and land exactly on the end of the word?
    reachable: dict[int, bool] = {}

    def from_position(i: int) -> bool:
        if i in reachable:
            return reachable[i]
        ok = False
        for length in range(min(max_stem, n - i), 2, -1):
            if word[i:i + length] not in lexicon.stems:
                continue
            end = i + length
            if end == n:
                ok = True
                break
            if any(word[end:end + len(l)] == l and from_position(end + len(l))
                   for l in links if end + len(l) <= n):
                ok = True
                break
        reachable[i] = ok
        return ok

    # First stem, then at least one more via from_position.
    for length in range(min(max_stem, n), 2, -1):
        if word[:length] not in lexicon.stems:
            continue
        if any(word[length:length + len(l)] == l and from_position(length + len(l))
               for l in links if length + len(l) <= n):
            return True
    return False


class TranslationProvider(Protocol):
    def translate(self, term: str) -> str: ...


class FileLexiconTranslator:
    """Offline translator backed by a TERM<TAB>TRANSLATION file."""

    def __init__(self, path: str | Path):
        self.path = Path(path)
        self._entries: dict[str, str] = {}
        if not self.path.exists():
            raise ConceptGaugeError(f"translation cache not found: {self.path}")
        with open(self.path, encoding="utf-8") as f:
            for line in f:
                line = line.rstrip("\n")
                if not line.strip():
                    continue
                term, _, translation = line.partition("\t")
                self._entries[term] = translation

    def __contains__(self, term: str) -> bool:
        return term in self._entries

    def translate(self, term: str) -> str:
        try:
            return self._entries[term]
        except KeyError:
            raise CacheMissError(term) from None


class LiveTranslator:
    """Minimal HTTP translation client (English -> German).

    ``transport(term) -> translation`` is injectable; the default uses the
    public translate endpoint.  Not exercised by the offline test suite.
    """

    def __init__(self, transport: Callable[[str], str] | None = None,
                 max_retries: int = 3):
        self._transport = transport or _default_translate_transport
        self._max_retries = max_retries

    def translate(self, term: str) -> str:
        last: Exception | None = None
        for _ in range(self._max_retries):
            try:
                out = self._transport(term)
                if out.strip():
                    return out
                raise ProviderError(f"empty translation for {term!r}")
            except Exception as exc:  # noqa: BLE001
                last = exc
        raise ProviderError(f"translation failed for {term!r}: {last}")


def _default_translate_transport(term: str) -> str:
    import requests

    resp = requests.get(
        "https://translate.googleapis.com/translate_a/single",
        params={"client": "gtx", "sl": "en", "tl": "de", "dt": "t", "q": term},
        timeout=10,
    )
    resp.raise_for_status()
    payload = resp.json()
    return "".join(chunk[0] for chunk in payload[0] if chunk and chunk[0])


def translate(
    term: str,
    translator: TranslationProvider,
    lexicon: CompoundLexicon | None = None,
) -> TranslationRecord:
    """Translate a term and derive the word counts and compound flag."""
    if not term.strip():
        raise ConceptGaugeError("empty term")
    if lexicon is None:
        lexicon = CompoundLexicon.default()
    translated = translator.translate(term)
    source_tokens = tokenize(term)
    translated_tokens = tokenize(translated)
    has_compound = any(
        detect_compound(tok, lexicon) for tok in translated_tokens.tokens)
    return TranslationRecord(
        source_term=term,
        source_word_count=source_tokens.count,
        translated_term=translated,
        translated_word_count=translated_tokens.count,
        has_compound=has_compound,
    )


def glm_score(rec: TranslationRecord) -> float:
    """Band score for a translation, +0.1 compound reward capped at 1.0.

    Computed in tenths so every result is an exact decimal.
    """
    s = rec.source_word_count
    t = rec.translated_word_count
    if s < 1:
        raise ConceptGaugeError(f"source word count must be >= 1, got {s}")
    if t < 1:
        raise ConceptGaugeError(f"translated word count must be >= 1, got {t}")

    if s <= 3:
        if t <= s:
            tenths = 10
        elif t == s + 1:
            tenths = 8
        else:
            tenths = 5
    elif s <= 6:
        if t < s:
            tenths = 10
        elif t == s:
            tenths = 8
        else:
            tenths = 5
    elif s <= 20:
        if 5 * t <= 4 * s:
            tenths = 9
        elif t < s:
            tenths = 7
        else:
            tenths = 4
    else:
        tenths = 7 if 5 * t <= 4 * s else 4

    if rec.has_compound:
        tenths = min(tenths + 1, 10)
    return tenths / 10.0
