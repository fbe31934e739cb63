"""Chance-corrected inter-rater agreement (Krippendorff's alpha).

alpha = 1 - D_o/D_e over the coincidence matrix of pairable values, which
tolerates missing cells: items keep only the ratings actually present and
items with fewer than two ratings drop out.  The nominal difference function
is the default (buckets are categories); ordinal is available for graded
data.

Also houses the 5-level survey scale and its mapping onto the three
Good/Moderate/Bad buckets.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass, field
from typing import Iterable, Mapping, Sequence

import numpy as np

from .errors import ConceptGaugeError, DegenerateDataError

logger = logging.getLogger(__name__)

GOOD = "Good"
MODERATE = "Moderate"
BAD = "Bad"
BUCKET_ORDER = (BAD, MODERATE, GOOD)

NOMINAL = "nominal"
ORDINAL = "ordinal"

METRIC_RATER_ID = "(metric)"

# The five answer levels offered to raters, strongest endorsement first.
RATING_LABELS = {
    5: "Definitely a Medical Concept",
    4: "Acceptable as a medical concept",
    3: "Neutral",
    2: "Doubtful as a medical concept",
    1: "Definitely not a medical concept",
}


def map_rating(level: int) -> str:
    """Fold a 1..5 rating onto the three buckets: 4-5 Good, 3 Moderate,
    1-2 Bad."""
    if level in (4, 5):
        return GOOD
    if level == 3:
        return MODERATE
    if level in (1, 2):
        return BAD
    raise ConceptGaugeError(f"rating level must be 1..5, got {level!r}")


@dataclass
class RatingMatrix:
    """raters x items grid of categorical ratings; cells may be missing."""

    raters: list[str] = field(default_factory=list)
    items: list[str] = field(default_factory=list)
    cells: dict[tuple[str, str], str] = field(default_factory=dict)

    def add(self, rater: str, item: str, value: str) -> None:
        if rater not in self.raters:
            self.raters.append(rater)
        if item not in self.items:
            self.items.append(item)
        self.cells[(rater, item)] = value

    def get(self, rater: str, item: str) -> str | None:
        return self.cells.get((rater, item))

    def ratings_for(self, rater: str) -> dict[str, str]:
        return {item: v for (r, item), v in self.cells.items() if r == rater}

    def restricted(self, items: Sequence[str]) -> "RatingMatrix":
        keep = [i for i in items if i in set(self.items)]
        cells = {(r, i): v for (r, i), v in self.cells.items() if i in set(keep)}
        raters = [r for r in self.raters
                  if any((r, i) in cells for i in keep)]
        return RatingMatrix(raters=raters, items=list(keep), cells=cells)

    def categories(self) -> list[str]:
        """Observed categories in canonical order (bucket order when the
        values are buckets, numeric order for numbers, else lexicographic)."""
        observed = set(self.cells.values())
        if observed <= set(BUCKET_ORDER):
            return [b for b in BUCKET_ORDER if b in observed]
        try:
            return sorted(observed, key=float)
        except ValueError:
            return sorted(observed)

    def to_codes(self, categories: Sequence[str]) -> np.ndarray:
        """(raters, items) int matrix; -1 marks a missing cell."""
        index = {c: k for k, c in enumerate(categories)}
        codes = np.full((len(self.raters), len(self.items)), -1, dtype=np.int64)
        for (rater, item), value in self.cells.items():
            codes[self.raters.index(rater), self.items.index(item)] = index[value]
        return codes


@dataclass(frozen=True)
class ReliabilityResult:
    alpha: float
    n_items: int
    n_raters: int
    level_of_measurement: str

    @property
    def percent(self) -> float:
        return self.alpha * 100.0

    def __str__(self) -> str:
        return (f"alpha={self.alpha:.6f} ({self.percent:.2f}%) over "
                f"{self.n_items} items, {self.n_raters} raters "
                f"[{self.level_of_measurement}]")


def alpha_from_codes(codes: np.ndarray, n_categories: int,
                     level: str = NOMINAL) -> tuple[float, int]:
    """alpha over an integer-coded (raters, items) matrix with -1 = missing.

    Returns (alpha, number of items that had >= 2 ratings).  This is the
    array-level core every public entry point funnels through.
    """
    if level not in (NOMINAL, ORDINAL):
        raise ConceptGaugeError(f"unknown level of measurement: {level}")
    if codes.ndim != 2:
        raise ConceptGaugeError("codes must be a 2-D raters x items matrix")
    k = n_categories

    # per-item category counts: N[c, u] = how many raters gave item u code c
    mask = codes >= 0
    m_u = mask.sum(axis=0)
    usable = m_u >= 2
    n_items_used = int(usable.sum())
    if n_items_used == 0:
        raise DegenerateDataError("no item has two or more ratings")

    cols = np.where(usable)[0]
    sub = codes[:, cols]
    sub_mask = mask[:, cols]
    counts = np.zeros((k, len(cols)))
    for c in range(k):
        counts[c] = ((sub == c) & sub_mask).sum(axis=0)
    m = m_u[cols].astype(float)

    # coincidence matrix: o_ck = sum_u n_uc*n_uk/(m_u-1), diagonal uses
    # n_uc*(n_uc-1)/(m_u-1) because a value cannot pair with itself
    weighted = counts / (m - 1.0)
    coincidence = weighted @ counts.T
    coincidence[np.diag_indices(k)] -= weighted.sum(axis=1)

    marginals = coincidence.sum(axis=1)
    n_total = marginals.sum()
    if n_total < 2:
        raise DegenerateDataError("fewer than 2 pairable values")

    if level == NOMINAL:
        delta_sq = 1.0 - np.eye(k)
    else:
        # ordinal: squared count of values lying between the two categories
        delta_sq = np.zeros((k, k))
        for c in range(k):
            for g in range(c + 1, k):
                span = marginals[c:g + 1].sum() - (marginals[c] + marginals[g]) / 2.0
                delta_sq[c, g] = delta_sq[g, c] = span * span

    d_o = float((coincidence * delta_sq).sum()) / n_total
    d_e = float((np.outer(marginals, marginals) * delta_sq).sum()) / (
        n_total * (n_total - 1.0))
    if d_e == 0.0:
        raise DegenerateDataError(
            "expected disagreement is zero (all ratings in one category)")
    return float(1.0 - d_o / d_e), n_items_used


def krippendorff_alpha(matrix: RatingMatrix,
                       level: str = NOMINAL) -> ReliabilityResult:
    """alpha for a rating matrix; raises DegenerateDataError when undefined."""
    if len(matrix.raters) < 2:
        raise ConceptGaugeError("need at least 2 raters")
    categories = matrix.categories()
    codes = matrix.to_codes(categories)
    alpha, n_items = alpha_from_codes(codes, len(categories), level)
    return ReliabilityResult(
        alpha=alpha,
        n_items=n_items,
        n_raters=len(matrix.raters),
        level_of_measurement=level,
    )


def metric_agreement(
    buckets: Mapping[str, str],
    ratings: RatingMatrix,
    level: str = NOMINAL,
) -> ReliabilityResult:
    """alpha treating the metric's buckets as one more rater.

    Only items rated by at least one rater AND bucketed by the metric
    participate.
    """
    common = [item for item in ratings.items if item in buckets]
    if not common:
        raise ConceptGaugeError(
            "metric buckets and ratings share no concept identifiers")
    joined = ratings.restricted(common)
    for item in common:
        joined.add(METRIC_RATER_ID, item, buckets[item])
    return krippendorff_alpha(joined, level)


def matrix_from_records(
    records: Iterable[tuple[str, str, str]],
) -> RatingMatrix:
    """Build a matrix from (rater_id, item, value) triples, last write wins."""
    matrix = RatingMatrix()
    for rater, item, value in records:
        if (rater, item) in matrix.cells:
            logger.warning("duplicate rating for (%s, %s); keeping the last", rater, item)
        matrix.add(rater, item, value)
    return matrix


def read_ratings_csv(path) -> list[tuple[str, str, str]]:
    """Read RATER_ID,CUI,LEVEL rows; LEVEL is 1..5 (mapped to buckets) or a
    bucket label; blank means missing and is skipped."""
    import csv

    triples: list[tuple[str, str, str]] = []
    with open(path, encoding="utf-8", newline="") as f:
        for line_no, row in enumerate(csv.reader(f), start=1):
            if not row or all(not c.strip() for c in row):
                continue
            if len(row) != 3:
                raise ConceptGaugeError(
                    f"{path}: line {line_no}: expected RATER_ID,CUI,LEVEL")
            rater, cui, value = (c.strip() for c in row)
            if not value:
                continue
            if value in BUCKET_ORDER:
                bucket = value
            else:
                try:
                    bucket = map_rating(int(value))
                except ValueError:
                    raise ConceptGaugeError(
                        f"{path}: line {line_no}: level must be 1..5 or a "
                        f"bucket label, got {value!r}") from None
                except ConceptGaugeError as exc:
                    raise ConceptGaugeError(
                        f"{path}: line {line_no}: {exc}") from None
            triples.append((rater, cui, bucket))
    return triples
