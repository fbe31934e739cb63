from __future__ import annotations

import random

import numpy as np
import pytest

from conceptgauge.errors import ConceptGaugeError, DegenerateDataError
from conceptgauge.reliability import (BAD, GOOD, MODERATE,
                                      RATING_LABELS, RatingMatrix,
                                      ReliabilityResult, alpha_from_codes,
                                      krippendorff_alpha, map_rating,
                                      matrix_from_records, metric_agreement,
                                      read_ratings_csv)

from .oracles import brute_force_alpha

# Worked 4-observer, 12-unit example; '.' marks a missing cell.  The frozen
# alpha values below come from the exhaustive pair-counting oracle.
WORKED_ROWS = [
    "1 2 3 3 2 1 4 1 2 . . .",
    "1 2 3 3 2 2 4 1 2 5 . 3",
    ". 3 3 3 2 3 4 2 2 5 1 .",
    "1 2 3 3 2 4 4 1 2 5 1 .",
]
WORKED_NOMINAL_ALPHA = 0.743421052631579
WORKED_ORDINAL_ALPHA = 0.8153875037548813


def worked_codes() -> np.ndarray:
    return np.array([
        [int(c) - 1 if c != "." else -1 for c in row.split()]
        for row in WORKED_ROWS
    ])


def matrix_from_codes(codes: np.ndarray) -> RatingMatrix:
    matrix = RatingMatrix()
    for r in range(codes.shape[0]):
        for i in range(codes.shape[1]):
            if codes[r, i] >= 0:
                matrix.add(f"r{r}", f"item{i:03d}", str(codes[r, i] + 1))
    return matrix


@pytest.mark.parametrize("level,expected", [(4, GOOD), (5, GOOD)])
def test_map_rating_good(level, expected):
    assert map_rating(level) == expected


def test_map_rating_moderate_and_bad():
    assert map_rating(3) == MODERATE
    assert map_rating(2) == BAD
    assert map_rating(1) == BAD


def test_map_rating_total_and_surjective():
    images = {map_rating(level) for level in range(1, 6)}
    assert images == {GOOD, MODERATE, BAD}


def test_map_rating_order_preserving():
    order = {BAD: 0, MODERATE: 1, GOOD: 2}
    mapped = [order[map_rating(level)] for level in range(1, 6)]
    assert mapped == sorted(mapped)


@pytest.mark.parametrize("bad", [0, 6, -1])
def test_map_rating_range(bad):
    with pytest.raises(ConceptGaugeError):
        map_rating(bad)


def test_rating_labels_cover_the_five_levels():
    assert sorted(RATING_LABELS) == [1, 2, 3, 4, 5]


def test_perfect_agreement_is_exactly_one():
    matrix = RatingMatrix()
    for item, bucket in enumerate([GOOD, BAD, MODERATE, GOOD]):
        matrix.add("a", f"i{item}", bucket)
        matrix.add("b", f"i{item}", bucket)
    result = krippendorff_alpha(matrix)
    assert result.alpha == 1.0
    assert result.n_raters == 2
    assert result.n_items == 4


def test_worked_example_nominal_and_ordinal():
    codes = worked_codes()
    nominal, n_items = alpha_from_codes(codes, 5, "nominal")
    assert n_items == 11  # one unit has a single rating and drops out
    assert nominal == pytest.approx(WORKED_NOMINAL_ALPHA, abs=1e-9)
    assert nominal == pytest.approx(brute_force_alpha(codes, "nominal"), abs=1e-9)
    ordinal, _ = alpha_from_codes(codes, 5, "ordinal")
    assert ordinal == pytest.approx(WORKED_ORDINAL_ALPHA, abs=1e-9)
    assert ordinal == pytest.approx(brute_force_alpha(codes, "ordinal"), abs=1e-9)


def test_systematic_disagreement_is_negative():
    matrix = RatingMatrix()
    for item in range(6):
        matrix.add("a", f"i{item}", GOOD if item % 2 else BAD)
        matrix.add("b", f"i{item}", BAD if item % 2 else GOOD)
    result = krippendorff_alpha(matrix)
    assert result.alpha < 0
    codes = matrix.to_codes(matrix.categories())
    assert result.alpha == pytest.approx(brute_force_alpha(codes), abs=1e-12)


def test_agreement_with_oracle_on_random_matrices():
    rng = np.random.default_rng(123)
    checked = 0
    while checked < 30:
        raters = rng.integers(2, 6)
        items = rng.integers(5, 40)
        k = rng.integers(2, 4)
        codes = rng.integers(0, k, size=(raters, items))
        codes[rng.random(codes.shape) < 0.25] = -1
        level = "nominal" if checked % 2 else "ordinal"
        try:
            expected = brute_force_alpha(codes, level)
        except ValueError:
            continue
        got, _ = alpha_from_codes(codes, int(k), level)
        assert got == pytest.approx(expected, abs=1e-9)
        checked += 1


def test_single_category_is_degenerate():
    matrix = RatingMatrix()
    for item in range(5):
        matrix.add("a", f"i{item}", GOOD)
        matrix.add("b", f"i{item}", GOOD)
    with pytest.raises(DegenerateDataError):
        krippendorff_alpha(matrix)


def test_fewer_than_two_pairable_values():
    matrix = RatingMatrix()
    matrix.add("a", "i0", GOOD)
    matrix.add("b", "i1", BAD)  # no item has two ratings
    with pytest.raises(DegenerateDataError):
        krippendorff_alpha(matrix)


def test_needs_two_raters():
    matrix = RatingMatrix()
    matrix.add("a", "i0", GOOD)
    with pytest.raises(ConceptGaugeError):
        krippendorff_alpha(matrix)


def test_alpha_invariant_under_reordering():
    codes = worked_codes()
    base, _ = alpha_from_codes(codes, 5)
    rng = np.random.default_rng(7)
    shuffled = codes[rng.permutation(codes.shape[0])][:, rng.permutation(codes.shape[1])]
    permuted, _ = alpha_from_codes(shuffled, 5)
    assert permuted == pytest.approx(base, abs=1e-12)


def test_nominal_alpha_invariant_under_relabeling():
    codes = worked_codes()
    base, _ = alpha_from_codes(codes, 5, "nominal")
    relabel = np.array([3, 0, 4, 1, 2])
    relabeled = np.where(codes >= 0, relabel[np.clip(codes, 0, 4)], -1)
    swapped, _ = alpha_from_codes(relabeled, 5, "nominal")
    assert swapped == pytest.approx(base, abs=1e-12)


def test_deleting_agreed_item_keeps_disagreement_numerator():
    # regression fixture: removing an all-agree item leaves the within-unit
    # disagreement sum untouched
    def numerator(codes):
        total = 0.0
        for u in range(codes.shape[1]):
            vals = [v for v in codes[:, u] if v >= 0]
            if len(vals) < 2:
                continue
            m = len(vals)
            total += sum(a != b for a in vals for b in vals) / (m - 1)
        return total

    codes = np.array([
        [0, 1, 2, 0, 1],
        [0, 1, 2, 1, 2],
        [0, 1, 2, 0, 1],
    ])
    without_agreed = codes[:, 3:]  # drop the three all-agree items
    assert numerator(codes) == pytest.approx(numerator(without_agreed))


def test_metric_agreement_identical_buckets():
    ratings = RatingMatrix()
    buckets = {}
    for item, bucket in enumerate([GOOD, BAD, MODERATE, GOOD, BAD]):
        ratings.add("ref", f"i{item}", bucket)
        buckets[f"i{item}"] = bucket
    result = metric_agreement(buckets, ratings)
    assert result.alpha == 1.0
    assert result.n_raters == 2  # reference rater plus the metric


def test_metric_agreement_half_flipped_matches_oracle():
    ratings = RatingMatrix()
    buckets = {}
    for item in range(20):
        truth = GOOD if item % 2 else BAD
        ratings.add("ref", f"i{item}", truth)
        flipped = truth if item < 10 else (BAD if truth == GOOD else GOOD)
        buckets[f"i{item}"] = flipped
    result = metric_agreement(buckets, ratings)
    joined = ratings.restricted(list(buckets))
    for item, bucket in buckets.items():
        joined.add("(metric)", item, bucket)
    codes = joined.to_codes(joined.categories())
    assert result.alpha == pytest.approx(brute_force_alpha(codes), abs=1e-9)


def test_metric_agreement_disjoint_items_errors():
    ratings = RatingMatrix()
    ratings.add("ref", "i0", GOOD)
    with pytest.raises(ConceptGaugeError):
        metric_agreement({"other": GOOD}, ratings)


def test_ordinal_and_nominal_differ_on_graded_data():
    codes = worked_codes()
    nominal, _ = alpha_from_codes(codes, 5, "nominal")
    ordinal, _ = alpha_from_codes(codes, 5, "ordinal")
    assert nominal != ordinal


def test_result_percent_display():
    result = ReliabilityResult(alpha=0.4321, n_items=50, n_raters=3,
                               level_of_measurement="nominal")
    assert result.percent == pytest.approx(43.21)
    assert "43.21%" in str(result)


def test_read_ratings_csv(tmp_path):
    path = tmp_path / "ratings.csv"
    path.write_text(
        "P1,C0001,5\n"
        "P1,C0002,Good\n"
        "P2,C0001,3\n"
        "P2,C0002,\n"   # blank level = missing
        "P3,C0001,1\n",
        encoding="utf-8")
    triples = read_ratings_csv(path)
    assert ("P1", "C0001", GOOD) in triples
    assert ("P1", "C0002", GOOD) in triples
    assert ("P2", "C0001", MODERATE) in triples
    assert ("P3", "C0001", BAD) in triples
    assert len(triples) == 4


def test_read_ratings_csv_errors(tmp_path):
    bad_level = tmp_path / "bad_level.csv"
    bad_level.write_text("P1,C0001,6\n", encoding="utf-8")
    with pytest.raises(ConceptGaugeError) as err:
        read_ratings_csv(bad_level)
    assert "line 1" in str(err.value)

    bad_shape = tmp_path / "bad_shape.csv"
    bad_shape.write_text("P1,C0001,5\nP1,C0002\n", encoding="utf-8")
    with pytest.raises(ConceptGaugeError) as err:
        read_ratings_csv(bad_shape)
    assert "line 2" in str(err.value)


def test_matrix_from_records_last_write_wins(caplog):
    import logging

    with caplog.at_level(logging.WARNING):
        matrix = matrix_from_records([
            ("P1", "C1", GOOD), ("P1", "C1", BAD), ("P2", "C1", GOOD)])
    assert matrix.get("P1", "C1") == BAD
    assert "duplicate" in caplog.text
