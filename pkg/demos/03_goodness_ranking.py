"""
Scoring and ranking a corpus
============================

The full offline pipeline over the bundled 20-concept fixture: factor
scores, the weighted goodness score, and tertile buckets.
"""

from pathlib import Path

from conceptgauge.ingest import parse_concepts_file
from conceptgauge.scoring import DEFAULT_WEIGHTS
from conceptgauge.workspace import RunConfig, run_scoring

FIXTURES = Path(__file__).parent.parent / "tests" / "fixtures"

config = RunConfig(
    pubmed_cache=str(FIXTURES / "pubmed_counts.tsv"),
    translations=str(FIXTURES / "translations.tsv"),
    dictionary=str(FIXTURES / "dictionary.txt"),
    weights=DEFAULT_WEIGHTS,
    offline=True,
)

concepts = parse_concepts_file(FIXTURES / "concepts_20.tsv")
scored, buckets = run_scoring(config, concepts)

print(f"weights = {config.weights}  (brevity, frequency, german, dictionary)\n")
print(f"{'rank':>4}  {'gs':>8}  {'bucket':8}  term")
for rank, s in enumerate(scored, start=1):
    term = s.term if len(s.term) < 48 else s.term[:45] + "..."
    print(f"{rank:>4}  {s.gs:8.4f}  {buckets[s.cui]:8}  {term}")
