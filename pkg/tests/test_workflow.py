"""End-to-end survey loop: score, sample, rate, refit, rescore, resample."""

from __future__ import annotations

import numpy as np
import pytest

from conceptgauge.errors import ConceptGaugeError
from conceptgauge.optimize import ObjectiveSpec, evaluate_objective
from conceptgauge.reliability import matrix_from_records
from conceptgauge.scoring import (FactorScores, INITIAL_WEIGHTS, ScoredRow,
                                  Weights, bucketize, rescore_rows)
from conceptgauge.workspace import RunConfig, Workspace

TARGET_WEIGHTS = Weights(49, 19, 10, 20)


def synthetic_rows(n: int = 150, seed: int = 0) -> list[ScoredRow]:
    rng = np.random.default_rng(seed)
    factors = rng.random((n, 4))
    rows = [
        ScoredRow(cui=f"C{i:04d}", term=f"synthetic term {i}",
                  factors=FactorScores(*factors[i]), gs=0.0, bucket="Moderate")
        for i in range(n)
    ]
    return rescore_rows(rows, INITIAL_WEIGHTS)


def rate_like_target(ws: Workspace, iteration: int, rater: str) -> None:
    """Synthetic rater whose judgments equal the metric under TARGET_WEIGHTS."""
    sample = ws.load_sample(iteration)
    rows = ws.scored_rows()
    target_ranked = rescore_rows(rows, TARGET_WEIGHTS)
    buckets = bucketize(target_ranked)
    for cui in sample.concepts:
        ws.add_rating(iteration, rater, cui, buckets[cui])


def test_two_iteration_loop(tmp_path):
    config = RunConfig(pool_size=50, seed=3)
    ws = Workspace(tmp_path / "ws", config)

    # round 1: initial weights, sample, collect ratings
    rows = synthetic_rows()
    sample1 = ws.start_iteration(rows, INITIAL_WEIGHTS, seed=3)
    assert ws.iterations() == [1]
    assert len(sample1.concepts) == 50
    rate_like_target(ws, 1, "P3")

    report1 = ws.report(1)
    assert report1.iteration == 1
    assert report1.histograms["P3"].total == 50

    # round 2: refit on the ratings, rescore, resample
    new_weights, sample2, trace = ws.advance(
        strategy="smbo", budget=60, seed=11, init_points=10)
    assert ws.iterations() == [1, 2]
    assert sample2.iteration == 2
    assert len(trace.evaluations) == 60

    # the fitted weights must agree with the ratings at least as well as the
    # round-1 weights did (evaluate_objective oracle)
    ratings = ws.ratings(1)
    reference = matrix_from_records(
        (r, cui, v) for (r, cui), v in ratings.cells.items())
    spec = ObjectiveSpec.from_scored_rows(rows, reference)
    assert evaluate_objective(spec, new_weights) >= evaluate_objective(
        spec, INITIAL_WEIGHTS)

    # round 2 collects new ratings and reports
    rate_like_target(ws, 2, "P3")
    report2 = ws.report(2)
    assert report2.weights_used == new_weights
    assert report2.alpha_metric_vs_rater["P3"] is not None


def test_rating_requires_known_concept(tmp_path):
    ws = Workspace(tmp_path / "ws", RunConfig(pool_size=50))
    ws.start_iteration(synthetic_rows(), INITIAL_WEIGHTS, seed=1)
    with pytest.raises(ConceptGaugeError):
        ws.add_rating(1, "P1", "NOT_SAMPLED", "5")


def test_rating_frozen_iteration_rejected(tmp_path):
    ws = Workspace(tmp_path / "ws", RunConfig(pool_size=50))
    ws.start_iteration(synthetic_rows(), INITIAL_WEIGHTS, seed=1)
    sample = ws.load_sample(1)
    ws.add_rating(1, "P1", sample.concepts[0], "5")
    ws.advance(strategy="random", budget=10, seed=0)
    with pytest.raises(ConceptGaugeError):
        ws.add_rating(1, "P1", sample.concepts[1], "4")


def test_advance_without_ratings_conflicts(tmp_path):
    ws = Workspace(tmp_path / "ws", RunConfig(pool_size=50))
    ws.start_iteration(synthetic_rows(), INITIAL_WEIGHTS, seed=1)
    with pytest.raises(ConceptGaugeError):
        ws.advance(strategy="random", budget=10, seed=0)


def test_advance_picks_most_prolific_rater_by_default(tmp_path):
    ws = Workspace(tmp_path / "ws", RunConfig(pool_size=50))
    ws.start_iteration(synthetic_rows(), INITIAL_WEIGHTS, seed=2)
    sample = ws.load_sample(1)
    for cui in sample.concepts[:10]:
        ws.add_rating(1, "P_few", cui, "5")
    rate_like_target(ws, 1, "P_many")
    _, _, trace = ws.advance(strategy="random", budget=10, seed=0)
    meta = ws.meta(2)
    assert "rater=P_many" in meta["source"]


def test_advance_unknown_rater(tmp_path):
    ws = Workspace(tmp_path / "ws", RunConfig(pool_size=50))
    ws.start_iteration(synthetic_rows(), INITIAL_WEIGHTS, seed=2)
    sample = ws.load_sample(1)
    ws.add_rating(1, "P1", sample.concepts[0], "5")
    ws.add_rating(1, "P1", sample.concepts[1], "1")
    with pytest.raises(ConceptGaugeError):
        ws.advance(strategy="random", budget=10, seed=0, rater_id="GHOST")


def test_weights_history_records_rounds(tmp_path):
    ws = Workspace(tmp_path / "ws", RunConfig(pool_size=50))
    ws.start_iteration(synthetic_rows(), INITIAL_WEIGHTS, seed=1)
    rate_like_target(ws, 1, "P3")
    ws.advance(strategy="random", budget=20, seed=4)
    history = (ws.root / "weights_history.tsv").read_text(encoding="utf-8")
    lines = [l for l in history.splitlines() if l]
    assert len(lines) == 2
    assert lines[0].startswith("1\t20,25,25,30")
    assert lines[1].startswith("2\t")
