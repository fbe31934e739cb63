from __future__ import annotations

import logging

import numpy as np
import pytest

from conceptgauge.errors import ConceptGaugeError
from conceptgauge.ingest import Concept
from conceptgauge.reliability import BAD, GOOD, MODERATE, RatingMatrix
from conceptgauge.scoring import (FactorScores, ScoredConcept, Weights,
                                  bucketize)
from conceptgauge.survey import (export_sample, ingest_ratings,
                                 iteration_report, read_sample, sample_survey)


def make_ranked(n: int) -> list[ScoredConcept]:
    """n concepts ranked by construction: C0000 best, descending."""
    out = []
    for i in range(n):
        gs = 1.0 - i / n
        concept = Concept(cui=f"C{i:04d}", term=f"term {i}", language="ENG",
                          semantic_types=frozenset({"Finding"}), word_count=2)
        out.append(ScoredConcept(
            concept=concept,
            factors=FactorScores(gs, gs, gs, gs), gs=gs))
    return out


def test_sample_is_25_plus_25():
    sample = sample_survey(make_ranked(300), pool_size=100, seed=1)
    assert len(sample.concepts) == 50
    assert len(set(sample.concepts)) == 50
    tags = [sample.pool_tags[c] for c in sample.concepts]
    assert tags.count("top") == 25
    assert tags.count("bottom") == 25


def test_sample_of_exactly_fifty_is_the_whole_corpus():
    ranked = make_ranked(50)
    sample = sample_survey(ranked, pool_size=25, seed=9)
    assert sorted(sample.concepts) == sorted(s.cui for s in ranked)


def test_sample_deterministic_per_seed():
    ranked = make_ranked(400)
    a = sample_survey(ranked, pool_size=100, seed=7)
    b = sample_survey(ranked, pool_size=100, seed=7)
    assert a.concepts == b.concepts
    assert a.pool_tags == b.pool_tags
    c = sample_survey(ranked, pool_size=100, seed=8)
    assert a.concepts != c.concepts


def test_top_tags_respect_rank_membership():
    # rank-membership oracle: every top-tagged cui sits within ranks 1..100
    ranked = make_ranked(1000)
    sample = sample_survey(ranked, pool_size=100, seed=3)
    rank = {s.cui: i for i, s in enumerate(ranked)}
    for cui in sample.concepts:
        if sample.pool_tags[cui] == "top":
            assert rank[cui] < 100
        else:
            assert rank[cui] >= 900


def test_sample_too_small_corpus():
    with pytest.raises(ConceptGaugeError):
        sample_survey(make_ranked(150), pool_size=100, seed=0)
    with pytest.raises(ConceptGaugeError):
        sample_survey(make_ranked(100), pool_size=10, seed=0)


def test_sample_invariant_to_permutation_outside_pools():
    ranked = make_ranked(500)
    rng = np.random.default_rng(0)
    middle = ranked[100:400]
    shuffled = ranked[:100] + [middle[i] for i in rng.permutation(len(middle))] \
        + ranked[400:]
    a = sample_survey(ranked, pool_size=100, seed=5)
    b = sample_survey(shuffled, pool_size=100, seed=5)
    assert a.concepts == b.concepts


def test_export_blinds_raters(tmp_path):
    sample = sample_survey(make_ranked(120), pool_size=50, seed=2)
    path = tmp_path / "sample.tsv"
    export_sample(sample, path)
    lines = path.read_text(encoding="utf-8").splitlines()
    assert len(lines) == 50
    for line in lines:
        fields = line.split("\t")
        assert len(fields) == 2  # cui and term only, never scores or tags
    assert read_sample(path) == [tuple(l.split("\t")) for l in lines]


def write_ratings(path, rows):
    path.write_text("".join(f"{r},{c},{v}\n" for r, c, v in rows),
                    encoding="utf-8")


def test_ingest_ratings_shape(tmp_path):
    sample = sample_survey(make_ranked(120), pool_size=50, seed=4)
    rows = []
    for rater in ("P1", "P2", "P3"):
        for cui in sample.concepts:
            rows.append((rater, cui, 5))
    path = tmp_path / "ratings.csv"
    write_ratings(path, rows)
    matrix = ingest_ratings(path, known_cuis=sample.concepts)
    assert len(matrix.raters) == 3
    assert len(matrix.items) == 50
    assert len(matrix.cells) == 150


def test_ingest_ratings_rejects_bad_level(tmp_path):
    path = tmp_path / "ratings.csv"
    write_ratings(path, [("P1", "C0001", 6)])
    with pytest.raises(ConceptGaugeError):
        ingest_ratings(path)


def test_ingest_ratings_unknown_cui_warns(tmp_path, caplog):
    path = tmp_path / "ratings.csv"
    write_ratings(path, [("P1", "C0001", 5), ("P1", "UNKNOWN", 5)])
    with caplog.at_level(logging.WARNING):
        matrix = ingest_ratings(path, known_cuis=["C0001"])
    assert matrix.items == ["C0001"]
    assert "unknown" in caplog.text.lower()


def test_ingest_ratings_duplicate_last_write_wins(tmp_path, caplog):
    path = tmp_path / "ratings.csv"
    write_ratings(path, [("P1", "C0001", 5), ("P1", "C0001", 1)])
    with caplog.at_level(logging.WARNING):
        matrix = ingest_ratings(path)
    assert matrix.get("P1", "C0001") == BAD
    assert "duplicate" in caplog.text


def test_roundtrip_full_responses_cover_fifty(tmp_path):
    ranked = make_ranked(200)
    sample = sample_survey(ranked, pool_size=60, seed=6)
    export_sample(sample, tmp_path / "sample.tsv")
    pairs = read_sample(tmp_path / "sample.tsv")
    rng = np.random.default_rng(1)
    rows = []
    for rater in ("P1", "P2"):
        for cui, _ in pairs:
            rows.append((rater, cui, int(rng.integers(1, 6))))
    write_ratings(tmp_path / "ratings.csv", rows)
    matrix = ingest_ratings(tmp_path / "ratings.csv",
                            known_cuis=[c for c, _ in pairs])
    report = iteration_report(sample, matrix, ranked, Weights(25, 25, 25, 25))
    for rater in ("P1", "P2"):
        assert report.histograms[rater].total == 50


def test_report_metric_perfect_single_rater():
    ranked = make_ranked(120)
    sample = sample_survey(ranked, pool_size=50, seed=12)
    buckets = bucketize(ranked)
    ratings = RatingMatrix()
    for cui in sample.concepts:
        ratings.add("P1", cui, buckets[cui])
    report = iteration_report(sample, ratings, ranked, Weights(25, 25, 25, 25))
    assert report.alpha_metric_vs_rater["P1"] == 1.0
    assert report.alpha_all_raters is None  # single rater
    assert any("at least 2 raters" in n for n in report.notes)


def test_report_histogram_counts_and_ranges():
    ranked = make_ranked(120)
    sample = sample_survey(ranked, pool_size=50, seed=13)
    ratings = RatingMatrix()
    # counting oracle: 12 Good, 26 Moderate, 12 Bad
    for i, cui in enumerate(sample.concepts):
        bucket = GOOD if i < 12 else MODERATE if i < 38 else BAD
        ratings.add("P1", cui, bucket)
    report = iteration_report(sample, ratings, ranked, Weights(25, 25, 25, 25))
    hist = report.histograms["P1"]
    assert (hist.counts[GOOD], hist.counts[MODERATE], hist.counts[BAD]) == (12, 26, 12)
    assert hist.total == 50
    gs_by_cui = {s.cui: s.gs for s in ranked}
    for bucket in (GOOD, MODERATE, BAD):
        lo, hi = hist.score_ranges[bucket]
        rated = [gs_by_cui[c] for i, c in enumerate(sample.concepts)
                 if ratings.get("P1", c) == bucket]
        assert lo == min(rated) and hi == max(rated)


def test_report_requires_overlap():
    ranked = make_ranked(120)
    sample = sample_survey(ranked, pool_size=50, seed=14)
    ratings = RatingMatrix()
    ratings.add("P1", "NOT_IN_SAMPLE", GOOD)
    with pytest.raises(ConceptGaugeError):
        iteration_report(sample, ratings, ranked, Weights(25, 25, 25, 25))


def test_report_text_and_json(tmp_path):
    ranked = make_ranked(120)
    sample = sample_survey(ranked, pool_size=50, seed=15)
    buckets = bucketize(ranked)
    ratings = RatingMatrix()
    for cui in sample.concepts:
        ratings.add("P1", cui, buckets[cui])
        ratings.add("P2", cui, GOOD)
    report = iteration_report(sample, ratings, ranked, Weights(22, 27, 31, 15))
    text = report.to_text()
    assert "alpha_metric_vs\tP1\t1.000000" in text
    payload = report.to_json_dict()
    assert payload["weights"] == [22, 27, 31, 15]
    assert set(payload["histograms"]) == {"P1", "P2"}
    report.write_json(tmp_path / "report.json")
    import json
    loaded = json.loads((tmp_path / "report.json").read_text(encoding="utf-8"))
    assert loaded["iteration"] == report.iteration
