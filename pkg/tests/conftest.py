from __future__ import annotations

from pathlib import Path

import numpy as np
import pytest

from conceptgauge.optimize import ObjectiveSpec
from conceptgauge.reliability import BUCKET_ORDER, RatingMatrix
from conceptgauge.scoring import Weights, bucket_codes

FIXTURES = Path(__file__).parent / "fixtures"

# Construction seed for the planted-optimum corpus.  Chosen so that the
# step-10 grid contains a point reproducing the planted buckets exactly.
PLANTED_CORPUS_SEED = 0
PLANTED_WEIGHTS = Weights(49, 19, 10, 20)
REFERENCE_RATER = "P3"


def make_planted_spec(
    n_concepts: int = 200,
    corpus_seed: int = PLANTED_CORPUS_SEED,
    planted: Weights = PLANTED_WEIGHTS,
) -> ObjectiveSpec:
    """Synthetic corpus whose reference rater IS the metric under ``planted``."""
    rng = np.random.default_rng(corpus_seed)
    factors = rng.random((n_concepts, 4))
    cuis = [f"C{i:04d}" for i in range(n_concepts)]
    gs = factors @ planted.as_array() / planted.total()
    reference = RatingMatrix()
    for cui, code in zip(cuis, bucket_codes(gs)):
        reference.add(REFERENCE_RATER, cui, BUCKET_ORDER[code])
    return ObjectiveSpec(cuis, factors, reference)


@pytest.fixture
def fixtures_dir() -> Path:
    return FIXTURES


@pytest.fixture(scope="session")
def planted_spec() -> ObjectiveSpec:
    return make_planted_spec()


def score_fixture_args(out_path: Path) -> list[str]:
    """CLI argument list scoring the bundled 20-concept fixture offline."""
    return [
        "score",
        "--concepts", str(FIXTURES / "concepts_20.tsv"),
        "--pubmed-cache", str(FIXTURES / "pubmed_counts.tsv"),
        "--translations", str(FIXTURES / "translations.tsv"),
        "--dictionary", str(FIXTURES / "dictionary.txt"),
        "--offline",
        "--out", str(out_path),
    ]
