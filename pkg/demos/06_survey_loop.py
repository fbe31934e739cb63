"""
The survey iteration loop
=========================

Two full rounds end to end: score under starting weights, sample 50
concepts, collect ratings, refit the weights against the reference rater,
rescore and resample.  A synthetic rater stands in for the physician.
"""

import tempfile

import numpy as np

from conceptgauge.scoring import (FactorScores, INITIAL_WEIGHTS, ScoredRow,
                                  Weights, bucketize, rescore_rows)
from conceptgauge.workspace import RunConfig, Workspace

# The rater's hidden preference: judgments follow the metric under these
# weights, which the loop does not know and tries to recover.
HIDDEN = Weights(49, 19, 10, 20)

rng = np.random.default_rng(7)
rows = [
    ScoredRow(cui=f"C{i:04d}", term=f"concept {i}",
              factors=FactorScores(*rng.random(4)), gs=0.0, bucket="Moderate")
    for i in range(300)
]
rows = rescore_rows(rows, INITIAL_WEIGHTS)


def rate(workspace: Workspace, iteration: int) -> None:
    """The synthetic rater rates every sampled concept."""
    sample = workspace.load_sample(iteration)
    hidden_buckets = bucketize(rescore_rows(workspace.scored_rows(), HIDDEN))
    for cui in sample.concepts:
        workspace.add_rating(iteration, "P3", cui, hidden_buckets[cui])


with tempfile.TemporaryDirectory() as root:
    ws = Workspace(root, RunConfig(pool_size=100, seed=42))

    # Round 1: intuition weights.
    ws.start_iteration(rows, INITIAL_WEIGHTS, seed=42)
    rate(ws, 1)
    report = ws.report(1)
    print(f"round 1 weights {INITIAL_WEIGHTS}: "
          f"metric-vs-P3 alpha = {report.alpha_metric_vs_rater['P3']:.4f}")

    # Refit on the collected ratings, rescore, open round 2.
    weights, sample, trace = ws.advance(strategy="smbo", budget=150, seed=42)
    print(f"refit found {weights} "
          f"(objective {trace.best_value:.4f}, {len(trace.evaluations)} evaluations)")

    rate(ws, 2)
    report = ws.report(2)
    print(f"round 2 weights {weights}: "
          f"metric-vs-P3 alpha = {report.alpha_metric_vs_rater['P3']:.4f}")

    print(f"\nhidden weights were {HIDDEN}; "
          f"direction recovered up to scale and bucket ties")
