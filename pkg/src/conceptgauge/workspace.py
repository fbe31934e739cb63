"""Run configuration and the on-disk iteration workspace.

The workspace directory is the single source of truth for a survey loop:

    workdir/
      scored.tsv            current scored corpus
      weights_history.tsv   ITERATION<TAB>W1,W2,W3,W4<TAB>SOURCE
      iterations/<n>/
        sample.tsv          CUI<TAB>TERM, presentation order
        ratings.csv         append-only RATER_ID,CUI,LEVEL
        meta.json           iteration number, seed, pool size, weights

Both the CLI and the HTTP service drive the same Workspace methods, so an
"advance" does exactly what the optimize + score + sample commands do.
"""

from __future__ import annotations

import json
import logging
import threading
from dataclasses import dataclass
from pathlib import Path

from .errors import CacheMissError, ConceptGaugeError
from .frequency import CachedCountProvider, FrequencyCache, PubMedClient
from .german import CompoundLexicon, FileLexiconTranslator
from .ingest import Concept, corpus_stats
from .lexical import DictionaryIndex, PretaggedSource, RuleTagger
from .optimize import OptimizationTrace, ObjectiveSpec, run_strategy
from .reliability import RatingMatrix, matrix_from_records
from .scoring import (BucketThresholds, DEFAULT_WEIGHTS, FactorProviders,
                      ScoredRow, Weights, bucketize, read_scored,
                      rescore_rows, score_corpus, write_scored)
from .survey import (SurveySample, export_sample, ingest_ratings,
                     iteration_report, read_sample, sample_survey)

logger = logging.getLogger(__name__)

QUANTILE = "quantile"
FIXED = "fixed"


@dataclass
class RunConfig:
    """Everything a pipeline run needs; flags override config-file values."""

    concepts: str | None = None
    pubmed_cache: str | None = None
    translations: str | None = None
    dictionary: str | None = None
    stems: str | None = None
    tag_lexicon: str | None = None
    pretagged: str | None = None
    weights: Weights = DEFAULT_WEIGHTS
    bucket_mode: str = QUANTILE
    thresholds: BucketThresholds | None = None
    offline: bool = True
    seed: int = 0
    pool_size: int = 100
    port: int = 8077
    max_word_count: int | None = None
    max_count: int | None = None

    def bucket_thresholds(self) -> BucketThresholds | None:
        if self.bucket_mode == QUANTILE:
            return None
        if self.bucket_mode == FIXED:
            if self.thresholds is None:
                raise ConceptGaugeError("fixed bucket mode needs thresholds")
            return self.thresholds
        raise ConceptGaugeError(f"unknown bucket mode: {self.bucket_mode}")


def read_config_file(path: str | Path) -> dict[str, str]:
    """Parse a key=value config file; '#' starts a comment."""
    values: dict[str, str] = {}
    for line_no, line in enumerate(
            Path(path).read_text(encoding="utf-8").splitlines(), start=1):
        stripped = line.strip()
        if not stripped or stripped.startswith("#"):
            continue
        if "=" not in stripped:
            raise ConceptGaugeError(
                f"{path}: line {line_no}: expected key=value")
        key, _, value = stripped.partition("=")
        values[key.strip()] = value.strip()
    return values


def build_providers(config: RunConfig, concepts: list[Concept]) -> FactorProviders:
    """Assemble factor providers and normalization constants for a run.

    Offline runs verify up front that every term is covered by both caches
    and report the full missing list at once.
    """
    if config.pubmed_cache is None:
        raise ConceptGaugeError("a PubMed count cache file is required")
    if config.translations is None:
        raise ConceptGaugeError("a translation cache file is required")

    cache = FrequencyCache(config.pubmed_cache)
    translator = FileLexiconTranslator(config.translations)

    if config.offline:
        missing = sorted(
            {c.term for c in concepts if c.term not in cache}
            | {c.term for c in concepts if c.term not in translator})
        if missing:
            raise CacheMissError(missing)
        count_provider = CachedCountProvider(cache, client=None)
    else:
        count_provider = CachedCountProvider(cache, client=PubMedClient())

    stats = corpus_stats(concepts)
    counts = [count_provider.get_count(c.term).count for c in concepts]
    stats.max_frequency = max(counts) if counts else 0

    max_word_count = config.max_word_count or stats.max_word_count
    max_count = config.max_count if config.max_count is not None else stats.max_frequency

    dictionary = (DictionaryIndex.from_file(config.dictionary)
                  if config.dictionary else DictionaryIndex(set()))
    lexicon = (CompoundLexicon.from_file(config.stems)
               if config.stems else CompoundLexicon.default())
    tagger = (RuleTagger.from_file(config.tag_lexicon)
              if config.tag_lexicon else RuleTagger.default())
    pretagged = PretaggedSource(config.pretagged) if config.pretagged else None

    return FactorProviders(
        count_provider=count_provider,
        translator=translator,
        dictionary=dictionary,
        max_word_count=max_word_count,
        max_count=max_count,
        lexicon=lexicon,
        tagger=tagger,
        pretagged=pretagged,
    )


def run_scoring(config: RunConfig, concepts: list[Concept]):
    """Score a corpus under the configured weights; returns (scored, buckets)."""
    providers = build_providers(config, concepts)
    scored = score_corpus(concepts, providers, config.weights)
    buckets = bucketize(scored, config.bucket_thresholds())
    return scored, buckets


class Workspace:
    """Survey-loop state rooted at a directory; single-writer for ratings."""

    def __init__(self, root: str | Path, config: RunConfig | None = None):
        self.root = Path(root)
        self.config = config or RunConfig()
        self.root.mkdir(parents=True, exist_ok=True)
        (self.root / "iterations").mkdir(exist_ok=True)
        self._lock = threading.Lock()

    # -- paths ------------------------------------------------------------

    @property
    def scored_path(self) -> Path:
        return self.root / "scored.tsv"

    def iteration_dir(self, iteration: int) -> Path:
        return self.root / "iterations" / str(iteration)

    def sample_path(self, iteration: int) -> Path:
        return self.iteration_dir(iteration) / "sample.tsv"

    def ratings_path(self, iteration: int) -> Path:
        return self.iteration_dir(iteration) / "ratings.csv"

    def meta_path(self, iteration: int) -> Path:
        return self.iteration_dir(iteration) / "meta.json"

    # -- state ------------------------------------------------------------

    def iterations(self) -> list[int]:
        dirs = (self.root / "iterations").iterdir()
        return sorted(int(d.name) for d in dirs if d.name.isdigit())

    def current_iteration(self) -> int:
        iterations = self.iterations()
        if not iterations:
            raise ConceptGaugeError("workspace has no iterations yet")
        return iterations[-1]

    def scored_rows(self) -> list[ScoredRow]:
        if not self.scored_path.exists():
            raise ConceptGaugeError(f"no scored corpus at {self.scored_path}")
        return read_scored(self.scored_path)

    def meta(self, iteration: int) -> dict:
        path = self.meta_path(iteration)
        if not path.exists():
            raise ConceptGaugeError(f"unknown iteration {iteration}")
        return json.loads(path.read_text(encoding="utf-8"))

    def load_sample(self, iteration: int) -> SurveySample:
        meta = self.meta(iteration)
        pairs = read_sample(self.sample_path(iteration))
        return SurveySample(
            iteration=iteration,
            concepts=tuple(cui for cui, _ in pairs),
            pool_tags=meta.get("poolTags", {}),
            seed=meta["seed"],
            terms=dict(pairs),
        )

    # -- lifecycle ----------------------------------------------------------

    def start_iteration(
        self,
        rows: list[ScoredRow],
        weights: Weights,
        seed: int,
        iteration: int | None = None,
        source: str = "manual",
    ) -> SurveySample:
        """Record a (re)scored corpus and open a new survey round over it."""
        iteration = iteration or (max(self.iterations(), default=0) + 1)
        buckets = bucketize(rows, self.config.bucket_thresholds())
        write_scored(rows, buckets, self.scored_path)
        sample = sample_survey(rows, self.config.pool_size, seed, iteration)
        self.iteration_dir(iteration).mkdir(parents=True, exist_ok=True)
        export_sample(sample, self.sample_path(iteration))
        self.ratings_path(iteration).touch()
        meta = {
            "iteration": iteration,
            "seed": seed,
            "poolSize": self.config.pool_size,
            "weights": list(weights.as_tuple()),
            "poolTags": sample.pool_tags,
            "source": source,
        }
        self.meta_path(iteration).write_text(
            json.dumps(meta, indent=2, sort_keys=True) + "\n", encoding="utf-8")
        with open(self.root / "weights_history.tsv", "a", encoding="utf-8") as f:
            f.write(f"{iteration}\t{weights}\t{source}\n")
        return sample

    def add_rating(self, iteration: int, rater_id: str, cui: str, level: str) -> None:
        """Append one rating; only the newest iteration accepts writes."""
        with self._lock:
            known = self.iterations()
            if iteration not in known:
                raise ConceptGaugeError(f"unknown iteration {iteration}")
            if iteration != known[-1]:
                raise ConceptGaugeError(
                    f"iteration {iteration} is frozen; only the current "
                    f"iteration accepts ratings")
            sample = self.load_sample(iteration)
            if cui not in sample.terms:
                raise ConceptGaugeError(
                    f"concept {cui} is not part of iteration {iteration}")
            with open(self.ratings_path(iteration), "a", encoding="utf-8") as f:
                f.write(f"{rater_id},{cui},{level}\n")

    def ratings(self, iteration: int) -> RatingMatrix:
        sample = self.load_sample(iteration)
        return ingest_ratings(self.ratings_path(iteration),
                              known_cuis=sample.concepts)

    def stored_levels(self, iteration: int, rater_id: str) -> dict[str, str]:
        """One rater's raw stored choices (last write wins), for the UI's
        revisit view; levels as submitted, not bucket-mapped."""
        sample = self.load_sample(iteration)
        known = set(sample.concepts)
        levels: dict[str, str] = {}
        with open(self.ratings_path(iteration), encoding="utf-8") as f:
            for line in f:
                line = line.strip()
                if not line:
                    continue
                parts = line.split(",")
                if len(parts) != 3:
                    continue
                rater, cui, level = (p.strip() for p in parts)
                if rater == rater_id and cui in known and level:
                    levels[cui] = level
        return levels

    def report(self, iteration: int):
        sample = self.load_sample(iteration)
        ratings = self.ratings(iteration)
        weights = Weights(*self.meta(iteration)["weights"])
        return iteration_report(
            sample, ratings, self.scored_rows(), weights,
            self.config.bucket_thresholds())

    def advance(
        self,
        strategy: str = "smbo",
        budget: int = 200,
        seed: int = 0,
        rater_id: str | None = None,
        step: int = 10,
        init_points: int = 20,
    ) -> tuple[Weights, SurveySample, OptimizationTrace]:
        """Refit weights on the current round's ratings, rescore, resample.

        The reference rater defaults to whoever rated the most concepts
        (ties broken by id).  Rating writes are blocked while this runs.
        """
        with self._lock:
            iteration = self.current_iteration()
            ratings = self.ratings(iteration)
            if not ratings.cells:
                raise ConceptGaugeError(
                    f"iteration {iteration} has no ratings to fit against")
            if rater_id is None:
                by_count = sorted(
                    ((len(ratings.ratings_for(r)), r) for r in ratings.raters),
                    key=lambda t: (-t[0], t[1]))
                rater_id = by_count[0][1]
            elif rater_id not in ratings.raters:
                raise ConceptGaugeError(
                    f"rater {rater_id!r} has no ratings in iteration {iteration}")

            reference = matrix_from_records(
                (rater_id, cui, value)
                for (r, cui), value in ratings.cells.items() if r == rater_id)
            rows = self.scored_rows()
            spec = ObjectiveSpec.from_scored_rows(
                rows, reference, self.config.bucket_thresholds())
            trace = run_strategy(spec, strategy, step=step, budget=budget,
                                 seed=seed, init_points=init_points)
            new_weights = trace.best_weights

            rescored = rescore_rows(rows, new_weights)
            sample = self.start_iteration(
                rescored, new_weights, seed=seed,
                iteration=iteration + 1,
                source=f"advance:{strategy}:rater={rater_id}")
            return new_weights, sample, trace
