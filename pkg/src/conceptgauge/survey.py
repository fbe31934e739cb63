"""Survey rounds: sample 50 concepts, collect ratings, report agreement.

Each iteration draws 25 concepts uniformly from the top of the ranking and
25 from the bottom, shuffles the presentation order (raters must not see the
ranking), and — once ratings are in — reports the all-rater alpha, the
metric-vs-rater alpha per rater, and per-rater bucket histograms with the
score range falling in each bucket.
"""

from __future__ import annotations

import json
import logging
from dataclasses import dataclass, field
from pathlib import Path
from typing import Sequence

import numpy as np

from .errors import ConceptGaugeError, DegenerateDataError
from .reliability import (BUCKET_ORDER, RatingMatrix, krippendorff_alpha,
                          map_rating, matrix_from_records, metric_agreement,
                          read_ratings_csv)
from .scoring import ScoredConcept, BucketThresholds, Weights, bucketize

logger = logging.getLogger(__name__)

SAMPLE_PER_POOL = 25
TOP = "top"
BOTTOM = "bottom"


@dataclass(frozen=True)
class SurveySample:
    iteration: int
    concepts: tuple[str, ...]          # cuis in presentation order
    pool_tags: dict[str, str]          # cui -> top | bottom
    seed: int
    terms: dict[str, str]              # cui -> term, for export


def sample_survey(
    scored: Sequence[ScoredConcept],
    pool_size: int = 100,
    seed: int = 0,
    iteration: int = 1,
) -> SurveySample:
    """Draw 25 + 25 concepts from the top/bottom pools of a ranked corpus."""
    if pool_size < SAMPLE_PER_POOL:
        raise ConceptGaugeError(
            f"pool_size must be >= {SAMPLE_PER_POOL}, got {pool_size}")
    if len(scored) < 2 * pool_size:
        raise ConceptGaugeError(
            f"corpus of {len(scored)} concepts is too small for two "
            f"pools of {pool_size}")
    rng = np.random.default_rng(seed)
    top_pool = scored[:pool_size]
    bottom_pool = scored[-pool_size:]
    top_picks = [top_pool[i] for i in
                 rng.choice(pool_size, SAMPLE_PER_POOL, replace=False)]
    bottom_picks = [bottom_pool[i] for i in
                    rng.choice(pool_size, SAMPLE_PER_POOL, replace=False)]

    tags = {s.cui: TOP for s in top_picks}
    tags.update({s.cui: BOTTOM for s in bottom_picks})
    picks = top_picks + bottom_picks
    order = rng.permutation(len(picks))
    shuffled = [picks[i] for i in order]
    return SurveySample(
        iteration=iteration,
        concepts=tuple(s.cui for s in shuffled),
        pool_tags=tags,
        seed=seed,
        terms={s.cui: s.term for s in shuffled},
    )


def export_sample(sample: SurveySample, path: str | Path) -> None:
    """Write CUI<TAB>TERM in presentation order — terms only, no scores or
    pool tags, so raters stay blind to the ranking."""
    with open(path, "w", encoding="utf-8") as f:
        for cui in sample.concepts:
            f.write(f"{cui}\t{sample.terms[cui]}\n")


def read_sample(path: str | Path) -> list[tuple[str, str]]:
    pairs: list[tuple[str, str]] = []
    with open(path, encoding="utf-8") as f:
        for line_no, line in enumerate(f, start=1):
            line = line.rstrip("\n")
            if not line.strip():
                continue
            cui, sep, term = line.partition("\t")
            if not sep or not cui.strip() or not term.strip():
                raise ConceptGaugeError(
                    f"{path}: line {line_no}: expected CUI<TAB>TERM")
            pairs.append((cui.strip(), term.strip()))
    return pairs


def ingest_ratings(
    path: str | Path,
    known_cuis: Sequence[str] | None = None,
) -> RatingMatrix:
    """Load a ratings CSV into a matrix.

    Raw 1..5 levels are already folded onto buckets by the reader; rows for
    unknown cuis are rejected with a warning; duplicate (rater, cui) rows
    keep the last value.
    """
    triples = read_ratings_csv(path)
    if known_cuis is not None:
        known = set(known_cuis)
        kept = []
        for rater, cui, bucket in triples:
            if cui not in known:
                logger.warning("ignoring rating for unknown concept %s", cui)
                continue
            kept.append((rater, cui, bucket))
        triples = kept
    return matrix_from_records(triples)


@dataclass
class RaterHistogram:
    """Bucket counts for one rater plus the metric-score range per bucket."""

    counts: dict[str, int]
    score_ranges: dict[str, tuple[float, float] | None]

    @property
    def total(self) -> int:
        return sum(self.counts.values())


@dataclass
class IterationReport:
    iteration: int
    weights_used: Weights
    alpha_all_raters: float | None
    alpha_metric_vs_rater: dict[str, float | None]
    histograms: dict[str, RaterHistogram]
    notes: list[str] = field(default_factory=list)

    def to_text(self) -> str:
        lines = [
            f"iteration\t{self.iteration}",
            f"weights\t{self.weights_used}",
            f"alpha_all_raters\t"
            f"{'n/a' if self.alpha_all_raters is None else f'{self.alpha_all_raters:.6f}'}",
        ]
        for rater in sorted(self.alpha_metric_vs_rater):
            alpha = self.alpha_metric_vs_rater[rater]
            shown = "n/a" if alpha is None else f"{alpha:.6f}"
            lines.append(f"alpha_metric_vs\t{rater}\t{shown}")
        for rater in sorted(self.histograms):
            hist = self.histograms[rater]
            counts = " ".join(
                f"{b}={hist.counts.get(b, 0)}" for b in BUCKET_ORDER)
            lines.append(f"histogram\t{rater}\t{counts}")
            for bucket in BUCKET_ORDER:
                rng = hist.score_ranges.get(bucket)
                if rng is not None:
                    lines.append(
                        f"score_range\t{rater}\t{bucket}\t"
                        f"{rng[0]:.6f}..{rng[1]:.6f}")
        for note in self.notes:
            lines.append(f"note\t{note}")
        return "\n".join(lines) + "\n"

    def to_json_dict(self) -> dict:
        """lowerCamelCase JSON shape consumed by the survey UI."""
        return {
            "iteration": self.iteration,
            "weights": list(self.weights_used.as_tuple()),
            "alphaAllRaters": self.alpha_all_raters,
            "alphaMetricVsRater": dict(self.alpha_metric_vs_rater),
            "histograms": {
                rater: {
                    "counts": {b: hist.counts.get(b, 0) for b in BUCKET_ORDER},
                    "scoreRanges": {
                        b: (list(hist.score_ranges[b])
                            if hist.score_ranges.get(b) else None)
                        for b in BUCKET_ORDER
                    },
                }
                for rater, hist in self.histograms.items()
            },
            "notes": list(self.notes),
        }

    def write_json(self, path: str | Path) -> None:
        with open(path, "w", encoding="utf-8") as f:
            json.dump(self.to_json_dict(), f, indent=2, sort_keys=True)
            f.write("\n")


def iteration_report(
    sample: SurveySample,
    ratings: RatingMatrix,
    scored: Sequence[ScoredConcept],
    weights: Weights,
    thresholds: BucketThresholds | None = None,
) -> IterationReport:
    """Agreement and rating-distribution summary for one survey round."""
    sample_set = set(sample.concepts)
    rated = [item for item in ratings.items if item in sample_set]
    if not rated:
        raise ConceptGaugeError("ratings cover no sampled concept")

    buckets = bucketize(scored, thresholds)
    gs_by_cui = {s.cui: s.gs for s in scored}
    notes: list[str] = []

    alpha_all: float | None = None
    if len(ratings.raters) >= 2:
        try:
            alpha_all = krippendorff_alpha(ratings).alpha
        except DegenerateDataError as exc:
            notes.append(f"all-rater alpha undefined: {exc}")
    else:
        notes.append("all-rater alpha needs at least 2 raters")

    per_rater: dict[str, float | None] = {}
    histograms: dict[str, RaterHistogram] = {}
    for rater in ratings.raters:
        own = ratings.ratings_for(rater)
        single = RatingMatrix()
        for item, value in own.items():
            single.add(rater, item, value)
        try:
            per_rater[rater] = metric_agreement(buckets, single).alpha
        except (DegenerateDataError, ConceptGaugeError) as exc:
            per_rater[rater] = None
            notes.append(f"metric-vs-{rater} alpha undefined: {exc}")

        counts: dict[str, int] = {}
        ranges: dict[str, tuple[float, float] | None] = {}
        for bucket in BUCKET_ORDER:
            cuis = [c for c, v in own.items() if v == bucket]
            counts[bucket] = len(cuis)
            values = [gs_by_cui[c] for c in cuis if c in gs_by_cui]
            ranges[bucket] = (min(values), max(values)) if values else None
        histograms[rater] = RaterHistogram(counts=counts, score_ranges=ranges)

    return IterationReport(
        iteration=sample.iteration,
        weights_used=weights,
        alpha_all_raters=alpha_all,
        alpha_metric_vs_rater=per_rater,
        histograms=histograms,
        notes=notes,
    )
