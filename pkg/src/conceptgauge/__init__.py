"""conceptgauge: score candidate medical concepts for ontology extension.

Four factor scores — brevity, literature frequency, German mappability and
dictionary presence — combine into a weighted goodness score.  The package
also measures agreement between the metric's Good/Moderate/Bad buckets and
human raters (Krippendorff's alpha) and fits the factor weights to maximize
that agreement.
"""

from .brevity import DEFAULT_MAX_WORD_COUNT, TokenizedTerm, brevity_score, tokenize
from .errors import (CacheMissError, ConceptGaugeError, DegenerateDataError,
                     EmptyCorpusError, MalformedRecordError, ProviderError)
from .frequency import (FrequencyCache, FrequencyRecord, PubMedClient,
                        RateLimitPolicy, fetch_count, frequency_score)
from .german import (CompoundLexicon, TranslationRecord, detect_compound,
                     glm_score, translate)
from .ingest import (Concept, CorpusStats, SemanticTypeFilter, corpus_stats,
                     filter_language, filter_semantic_types, parse_concepts)
from .lexical import (DictionaryIndex, PatternScoreTable, RuleTagger,
                      dictionary_presence, dp_score, pattern_score, pos_tag)
from .optimize import (ObjectiveSpec, OptimizationTrace, SearchSpace,
                       evaluate_objective, grid_search, random_search,
                       smbo_optimize)
from .reliability import (RatingMatrix, ReliabilityResult, krippendorff_alpha,
                          map_rating, metric_agreement)
from .scoring import (BucketThresholds, DEFAULT_WEIGHTS, FactorScores,
                      INITIAL_WEIGHTS, SINGLE_RATER_WEIGHTS, ScoredConcept,
                      Weights, bucketize, goodness, score_corpus)
from .survey import (IterationReport, SurveySample, ingest_ratings,
                     iteration_report, sample_survey)

__version__ = "0.1.0"
