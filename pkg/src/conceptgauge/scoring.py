"""Goodness score: weighted mean of the four factors, ranking, bucketing.

    gs = (br*w1 + fo*w2 + glm*w3 + dp*w4) / (w1 + w2 + w3 + w4)

Weights are integers 0..100, not all zero.  Scored corpora are sorted by
descending score with ascending-CUI tie-break so runs are reproducible
byte for byte.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass
from pathlib import Path
from typing import Sequence

import numpy as np

from .brevity import brevity_score, tokenize
from .errors import CacheMissError, ConceptGaugeError, EmptyCorpusError
from .frequency import frequency_score
from .german import CompoundLexicon, glm_score, translate
from .ingest import Concept
from .lexical import (PatternScoreTable, PretaggedSource, RuleTagger,
                      dictionary_presence, dp_score, pattern_score, pos_tag)
from .reliability import BUCKET_ORDER

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class FactorScores:
    br: float
    fo: float
    glm: float
    dp: float

    def __post_init__(self):
        for name in ("br", "fo", "glm", "dp"):
            v = getattr(self, name)
            if not 0.0 <= v <= 1.0:
                raise ConceptGaugeError(f"factor {name}={v} outside [0, 1]")

    def as_array(self) -> np.ndarray:
        return np.array([self.br, self.fo, self.glm, self.dp])


@dataclass(frozen=True)
class Weights:
    """Non-negative integer weights for (brevity, frequency, german, dictionary)."""

    w1: int
    w2: int
    w3: int
    w4: int

    def __post_init__(self):
        for name in ("w1", "w2", "w3", "w4"):
            v = getattr(self, name)
            if not isinstance(v, int) or isinstance(v, bool):
                raise ConceptGaugeError(f"weight {name}={v!r} must be an integer")
            if not 0 <= v <= 100:
                raise ConceptGaugeError(f"weight {name}={v} outside 0..100")
        if self.total() == 0:
            raise ConceptGaugeError("weights must not all be zero")

    def total(self) -> int:
        return self.w1 + self.w2 + self.w3 + self.w4

    def as_tuple(self) -> tuple[int, int, int, int]:
        return (self.w1, self.w2, self.w3, self.w4)

    def as_array(self) -> np.ndarray:
        return np.array(self.as_tuple(), dtype=float)

    @classmethod
    def parse(cls, text: str) -> "Weights":
        parts = [p.strip() for p in text.replace(",", " ").split()]
        if len(parts) != 4:
            raise ConceptGaugeError(f"expected 4 weights, got {text!r}")
        return cls(*(int(p) for p in parts))

    def __str__(self) -> str:
        return f"{self.w1},{self.w2},{self.w3},{self.w4}"


# Bundled weight presets.  DEFAULT_WEIGHTS is the shipped default;
# INITIAL_WEIGHTS is the intuition-based starting point for a first survey
# round; SINGLE_RATER_WEIGHTS is an example of weights refit against one
# reference rater.
DEFAULT_WEIGHTS = Weights(22, 27, 31, 15)
INITIAL_WEIGHTS = Weights(20, 25, 25, 30)
SINGLE_RATER_WEIGHTS = Weights(49, 19, 10, 20)

WEIGHT_PRESETS = {
    "default": DEFAULT_WEIGHTS,
    "initial": INITIAL_WEIGHTS,
    "single-rater": SINGLE_RATER_WEIGHTS,
}


def goodness(f: FactorScores, w: Weights) -> float:
    """Weighted mean of the four factors; invariant under weight rescaling."""
    total = w.total()
    return (f.br * w.w1 + f.fo * w.w2 + f.glm * w.w3 + f.dp * w.w4) / total


def goodness_array(factors: np.ndarray, w: Weights) -> np.ndarray:
    """Vectorized goodness for an (n, 4) factor matrix."""
    if factors.ndim != 2 or factors.shape[1] != 4:
        raise ConceptGaugeError(f"factor matrix must be (n, 4), got {factors.shape}")
    return factors @ w.as_array() / w.total()


@dataclass(frozen=True)
class ScoredConcept:
    concept: Concept
    factors: FactorScores
    gs: float

    @property
    def cui(self) -> str:
        return self.concept.cui

    @property
    def term(self) -> str:
        return self.concept.term


@dataclass(frozen=True)
class BucketThresholds:
    lower: float
    upper: float

    def __post_init__(self):
        if not 0.0 <= self.lower <= self.upper <= 1.0:
            raise ConceptGaugeError(
                f"thresholds must satisfy 0 <= lower <= upper <= 1, "
                f"got ({self.lower}, {self.upper})")


class FactorProviders:
    """Bundle of offline/online providers that turn a Concept into factors.

    ``count_provider`` maps terms to PubMed counts, ``translator`` to German
    equivalents.  ``max_word_count`` / ``max_count`` normalize the brevity
    and frequency factors; compute them from the corpus before scoring.
    """

    def __init__(
        self,
        count_provider,
        translator,
        dictionary,
        max_word_count: int,
        max_count: int,
        lexicon: CompoundLexicon | None = None,
        tagger: RuleTagger | None = None,
        pretagged: PretaggedSource | None = None,
        pattern_table: PatternScoreTable | None = None,
    ):
        self.count_provider = count_provider
        self.translator = translator
        self.dictionary = dictionary
        self.max_word_count = max_word_count
        self.max_count = max_count
        self.lexicon = lexicon or CompoundLexicon.default()
        self.tagger = tagger or RuleTagger.default()
        self.pretagged = pretagged
        self.pattern_table = pattern_table or PatternScoreTable()

    def factors_for(self, concept: Concept) -> FactorScores:
        br = brevity_score(concept.word_count, self.max_word_count)

        record = self.count_provider.get_count(concept.term)
        fo = frequency_score(record.count, self.max_count)

        translation = translate(concept.term, self.translator, self.lexicon)
        glm = glm_score(translation)

        present = dictionary_presence(concept.term, self.dictionary)
        tags = None
        if self.pretagged is not None:
            tags = self.pretagged.tags_for(concept.term)
        if tags is None:
            tags = pos_tag(tokenize(concept.term).tokens, self.tagger)
        dp = dp_score(present, pattern_score(tags, self.pattern_table))

        return FactorScores(br=br, fo=fo, glm=glm, dp=dp)


def score_corpus(
    concepts: Sequence[Concept],
    providers: FactorProviders,
    weights: Weights = DEFAULT_WEIGHTS,
) -> list[ScoredConcept]:
    """Score every concept; descending gs, ties broken by ascending CUI."""
    scored: list[ScoredConcept] = []
    for concept in concepts:
        try:
            factors = providers.factors_for(concept)
        except CacheMissError:
            raise
        except ConceptGaugeError as exc:
            raise ConceptGaugeError(
                f"scoring failed for {concept.term!r}: {exc}") from exc
        scored.append(ScoredConcept(
            concept=concept, factors=factors, gs=goodness(factors, weights)))
    scored.sort(key=lambda s: (-s.gs, s.concept.cui))
    return scored


def bucket_codes(
    gs: Sequence[float] | np.ndarray,
    thresholds: BucketThresholds | None = None,
) -> np.ndarray:
    """Bucket codes (0=Bad, 1=Moderate, 2=Good) for an array of scores.

    With explicit thresholds: gs >= upper is Good, gs < lower is Bad.  With
    none (quantile mode), the cuts are the empirical tertiles; a degenerate
    distribution where both cuts coincide maps boundary values to Moderate,
    so an all-equal corpus is all Moderate.
    """
    values = np.asarray(gs, dtype=float)
    if thresholds is None:
        if values.size == 0:
            raise EmptyCorpusError("quantile bucketing needs at least one score")
        lower = float(np.quantile(values, 1.0 / 3.0))
        upper = float(np.quantile(values, 2.0 / 3.0))
        if lower == upper:
            return (values > upper).astype(np.int64) - (values < lower) + 1
    else:
        lower, upper = thresholds.lower, thresholds.upper
    return np.where(values >= upper, 2, np.where(values < lower, 0, 1))


def bucketize_values(
    gs: Sequence[float] | np.ndarray,
    thresholds: BucketThresholds | None = None,
) -> list[str]:
    """Bucket each score as Good/Moderate/Bad (see bucket_codes)."""
    codes = bucket_codes(gs, thresholds)
    return [BUCKET_ORDER[c] for c in codes]


def bucketize(
    scored: Sequence,
    thresholds: BucketThresholds | None = None,
) -> dict[str, str]:
    """Per-CUI bucket for scored entries (anything with .cui and .gs)."""
    labels = bucketize_values([s.gs for s in scored], thresholds)
    return {s.cui: label for s, label in zip(scored, labels)}


SCORED_HEADER = ("CUI", "TERM", "BR", "FO", "GLM", "DP", "GS", "BUCKET")


def write_scored(
    scored: Sequence,
    buckets: dict[str, str],
    path: str | Path,
) -> None:
    """Write the tab-separated scored table with 6-decimal fixed formatting.

    Accepts ScoredConcept or ScoredRow entries.
    """
    with open(path, "w", encoding="utf-8") as f:
        for s in scored:
            f.write(
                f"{s.cui}\t{s.term}\t"
                f"{s.factors.br:.6f}\t{s.factors.fo:.6f}\t"
                f"{s.factors.glm:.6f}\t{s.factors.dp:.6f}\t"
                f"{s.gs:.6f}\t{buckets[s.cui]}\n")


@dataclass(frozen=True)
class ScoredRow:
    """One parsed line of a scored output file."""

    cui: str
    term: str
    factors: FactorScores
    gs: float
    bucket: str


def rescore_rows(rows: Sequence["ScoredRow"], weights: Weights) -> list["ScoredRow"]:
    """Recompute gs for already-computed factor rows under new weights and
    re-rank (descending gs, ascending CUI)."""
    rescored = [
        ScoredRow(cui=r.cui, term=r.term, factors=r.factors,
                  gs=goodness(r.factors, weights), bucket=r.bucket)
        for r in rows
    ]
    rescored.sort(key=lambda r: (-r.gs, r.cui))
    return rescored


def read_scored(path: str | Path) -> list[ScoredRow]:
    rows: list[ScoredRow] = []
    with open(path, encoding="utf-8") as f:
        for line_no, line in enumerate(f, start=1):
            line = line.rstrip("\n")
            if not line.strip():
                continue
            fields = line.split("\t")
            if len(fields) != 8:
                raise ConceptGaugeError(
                    f"{path}: line {line_no}: expected 8 fields, got {len(fields)}")
            cui, term, br, fo, glm, dp, gs, bucket = fields
            rows.append(ScoredRow(
                cui=cui, term=term,
                factors=FactorScores(float(br), float(fo), float(glm), float(dp)),
                gs=float(gs), bucket=bucket))
    return rows
