"""Concept table parsing, semantic-type / language filtering, corpus stats.

Input format is a 4-column tab-separated file, one record per line:

    CUI<TAB>TERM<TAB>LANG<TAB>TYPE1|TYPE2|...

The bundled exclusion list (``data/excluded_semantic_types.txt``) holds the
semantic types that are dropped by default — chemicals, drugs, organisms,
devices and similar categories that are not candidate medical concepts.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass, field
from importlib import resources
from pathlib import Path
from typing import Iterable, TextIO

from .brevity import tokenize
from .errors import EmptyCorpusError, MalformedRecordError

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class Concept:
    """A candidate term: opaque identifier, name, language, semantic types."""

    cui: str
    term: str
    language: str
    semantic_types: frozenset[str]
    word_count: int


@dataclass(frozen=True)
class SemanticTypeFilter:
    excluded: frozenset[str]

    @classmethod
    def default(cls) -> "SemanticTypeFilter":
        return cls(excluded=frozenset(load_exclusion_list()))

    @classmethod
    def from_file(cls, path: str | Path) -> "SemanticTypeFilter":
        return cls(excluded=frozenset(load_exclusion_list(path)))


@dataclass
class CorpusStats:
    max_word_count: int
    concept_count: int
    # Highest PubMed hit count over the corpus; filled in by the frequency
    # module once counts have been fetched.
    max_frequency: int = 0


def load_exclusion_list(path: str | Path | None = None) -> list[str]:
    """Read an exclusion list (one semantic-type name per line).

    With no path, returns the bundled default list.
    """
    if path is None:
        text = resources.files("conceptgauge.data").joinpath(
            "excluded_semantic_types.txt").read_text(encoding="utf-8")
    else:
        text = Path(path).read_text(encoding="utf-8")
    return [line.strip() for line in text.splitlines() if line.strip()]


def parse_concepts(stream: Iterable[str] | TextIO) -> list[Concept]:
    """Parse tab-separated concept records into Concepts.

    Duplicate (cui, term) pairs collapse to the first occurrence.  A record
    with fewer than 4 fields or an empty term raises MalformedRecordError
    with its line number.
    """
    concepts: list[Concept] = []
    seen: set[tuple[str, str]] = set()
    for line_no, raw in enumerate(stream, start=1):
        line = raw.rstrip("\n").rstrip("\r")
        if not line.strip():
            continue
        fields = line.split("\t")
        if len(fields) < 4:
            raise MalformedRecordError(
                line_no, f"expected 4 tab-separated fields, got {len(fields)}")
        cui, term, language, types = fields[0], fields[1], fields[2], fields[3]
        if not cui.strip():
            raise MalformedRecordError(line_no, "empty CUI")
        if not term.strip():
            raise MalformedRecordError(line_no, "empty term")
        key = (cui.strip(), term.strip())
        if key in seen:
            continue
        seen.add(key)
        tokenized = tokenize(term)
        concepts.append(Concept(
            cui=cui.strip(),
            term=term.strip(),
            language=language.strip(),
            semantic_types=frozenset(
                t.strip() for t in types.split("|") if t.strip()),
            word_count=tokenized.count,
        ))
    return concepts


def parse_concepts_file(path: str | Path) -> list[Concept]:
    with open(path, encoding="utf-8") as f:
        return parse_concepts(f)


def filter_semantic_types(
    concepts: list[Concept], flt: SemanticTypeFilter | None = None
) -> list[Concept]:
    """Drop every concept having ANY semantic type in the exclusion set."""
    if flt is None:
        flt = SemanticTypeFilter.default()
    return [c for c in concepts if not (c.semantic_types & flt.excluded)]


def filter_language(concepts: list[Concept], lang: str = "ENG") -> list[Concept]:
    """Keep concepts whose language code equals ``lang`` exactly."""
    return [c for c in concepts if c.language == lang]


def corpus_stats(concepts: list[Concept]) -> CorpusStats:
    if not concepts:
        raise EmptyCorpusError("cannot compute stats for an empty corpus")
    return CorpusStats(
        max_word_count=max(c.word_count for c in concepts),
        concept_count=len(concepts),
    )


def write_concepts(concepts: list[Concept], path: str | Path) -> None:
    """Write concepts back out in the 4-column input format."""
    with open(path, "w", encoding="utf-8") as f:
        for c in concepts:
            types = "|".join(sorted(c.semantic_types))
            f.write(f"{c.cui}\t{c.term}\t{c.language}\t{types}\n")
