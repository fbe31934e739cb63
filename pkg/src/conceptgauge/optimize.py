"""Weight fitting: maximize agreement with a reference rater.

The objective for a weight vector w is the metric-vs-ratings alpha after
rescoring the cached factor table under w and re-bucketing.  Three search
strategies share it:

  * grid_search     — every point of the integer grid (step 10 gives 11^4
                      combinations; the all-zero corner is skipped)
  * random_search   — i.i.d. uniform integer draws
  * smbo_optimize   — sequential model-based search: a Gaussian-process
                      surrogate over past evaluations proposes the next
                      point by expected improvement over candidate draws

All strategies are deterministic given their seed and record every
evaluation in a replayable trace.
"""

from __future__ import annotations

import itertools
import logging
from dataclasses import dataclass, field
from pathlib import Path
from typing import Sequence

import numpy as np
from scipy.special import ndtr

from .errors import ConceptGaugeError, DegenerateDataError
from .reliability import BUCKET_ORDER, NOMINAL, RatingMatrix, alpha_from_codes
from .scoring import BucketThresholds, ScoredRow, Weights, bucket_codes

logger = logging.getLogger(__name__)

# Sentinel objective for weight vectors whose buckets make alpha undefined;
# orders below every valid alpha.
DEGENERATE_OBJECTIVE = -1.0

NEAR_OPTIMAL_TOLERANCE = 1e-9


@dataclass(frozen=True)
class SearchSpace:
    """Integer box 0..100 per weight, all-zeros excluded."""

    low: int = 0
    high: int = 100

    def grid_axis(self, step: int) -> range:
        if step <= 0 or (self.high - self.low) % step != 0:
            raise ConceptGaugeError(
                f"step {step} must divide {self.high - self.low}")
        return range(self.low, self.high + 1, step)

    def grid_point_count(self, step: int) -> int:
        return len(self.grid_axis(step)) ** 4


class ObjectiveSpec:
    """Frozen inputs of one fitting problem.

    Factor scores are computed once; re-evaluating a candidate only redoes
    the weighted mean, the bucketing and the agreement computation.
    """

    def __init__(
        self,
        cuis: Sequence[str],
        factors: np.ndarray,
        reference: RatingMatrix,
        thresholds: BucketThresholds | None = None,
        level: str = NOMINAL,
    ):
        factors = np.asarray(factors, dtype=float)
        if factors.ndim != 2 or factors.shape[1] != 4:
            raise ConceptGaugeError(
                f"factor matrix must be (n, 4), got {factors.shape}")
        if len(cuis) != factors.shape[0]:
            raise ConceptGaugeError("cuis and factor rows differ in length")
        self.cuis = list(cuis)
        self.factors = factors
        self.reference = reference
        self.thresholds = thresholds
        self.level = level

        position = {cui: i for i, cui in enumerate(self.cuis)}
        common = [item for item in reference.items if item in position]
        if not common:
            raise ConceptGaugeError(
                "reference ratings share no concept identifiers with the corpus")
        restricted = reference.restricted(common)
        self._common_positions = np.array([position[c] for c in common])
        self._reference_codes = restricted.to_codes(BUCKET_ORDER)

    @classmethod
    def from_scored_rows(
        cls,
        rows: Sequence[ScoredRow],
        reference: RatingMatrix,
        thresholds: BucketThresholds | None = None,
        level: str = NOMINAL,
    ) -> "ObjectiveSpec":
        factors = np.array([
            [r.factors.br, r.factors.fo, r.factors.glm, r.factors.dp]
            for r in rows
        ])
        return cls([r.cui for r in rows], factors, reference, thresholds, level)


def evaluate_objective(spec: ObjectiveSpec, w: Weights) -> float:
    """Agreement achieved by w; DEGENERATE_OBJECTIVE when alpha is undefined."""
    gs = spec.factors @ w.as_array() / w.total()
    codes = bucket_codes(gs, spec.thresholds)
    metric_row = codes[spec._common_positions]
    stacked = np.vstack([spec._reference_codes, metric_row])
    try:
        alpha, _ = alpha_from_codes(stacked, len(BUCKET_ORDER), spec.level)
    except DegenerateDataError:
        return DEGENERATE_OBJECTIVE
    return alpha


@dataclass(frozen=True)
class TraceEntry:
    weights: Weights
    value: float

    @property
    def degenerate(self) -> bool:
        return self.value == DEGENERATE_OBJECTIVE


@dataclass
class OptimizationTrace:
    strategy: str
    seed: int | None
    evaluations: list[TraceEntry] = field(default_factory=list)
    near_optimal: list[Weights] = field(default_factory=list)

    def record(self, weights: Weights, value: float) -> None:
        self.evaluations.append(TraceEntry(weights, value))

    @property
    def best(self) -> TraceEntry:
        if not self.evaluations:
            raise ConceptGaugeError("empty trace")
        best = self.evaluations[0]
        for entry in self.evaluations[1:]:
            if entry.value > best.value:
                best = entry
        return best

    @property
    def best_weights(self) -> Weights:
        return self.best.weights

    @property
    def best_value(self) -> float:
        return self.best.value

    @property
    def n_degenerate(self) -> int:
        return sum(1 for e in self.evaluations if e.degenerate)

    def write(self, path: str | Path) -> None:
        with open(path, "w", encoding="utf-8") as f:
            for entry in self.evaluations:
                f.write(f"{entry.weights}\t{entry.value!r}\n")
            f.write("\n")
            f.write(f"strategy\t{self.strategy}\n")
            f.write(f"seed\t{'' if self.seed is None else self.seed}\n")
            f.write(f"best_weights\t{self.best_weights}\n")
            f.write(f"best_value\t{self.best_value!r}\n")
            f.write(f"evaluations\t{len(self.evaluations)}\n")
            if self.near_optimal:
                joined = ";".join(str(w) for w in self.near_optimal)
                f.write(f"near_optimal\t{joined}\n")

    @classmethod
    def read(cls, path: str | Path) -> "OptimizationTrace":
        evaluations: list[TraceEntry] = []
        summary: dict[str, str] = {}
        in_summary = False
        with open(path, encoding="utf-8") as f:
            for line in f:
                line = line.rstrip("\n")
                if not line.strip():
                    in_summary = True
                    continue
                key, _, value = line.partition("\t")
                if in_summary:
                    summary[key] = value
                else:
                    evaluations.append(
                        TraceEntry(Weights.parse(key), float(value)))
        trace = cls(
            strategy=summary.get("strategy", "unknown"),
            seed=int(summary["seed"]) if summary.get("seed") else None,
            evaluations=evaluations,
        )
        if "near_optimal" in summary:
            trace.near_optimal = [
                Weights.parse(p) for p in summary["near_optimal"].split(";") if p]
        return trace


def grid_search(
    spec: ObjectiveSpec,
    step: int = 10,
    space: SearchSpace | None = None,
    tolerance: float = NEAR_OPTIMAL_TOLERANCE,
) -> OptimizationTrace:
    """Evaluate every grid point except all-zeros, in lexicographic order.

    ``near_optimal`` collects every point whose objective is within
    ``tolerance`` of the best — ties on plateaus are common and worth seeing.
    """
    space = space or SearchSpace()
    axis = space.grid_axis(step)
    trace = OptimizationTrace(strategy="grid", seed=None)
    for combo in itertools.product(axis, repeat=4):
        if combo == (0, 0, 0, 0):
            continue
        w = Weights(*combo)
        trace.record(w, evaluate_objective(spec, w))
    best_value = trace.best_value
    trace.near_optimal = [
        e.weights for e in trace.evaluations
        if best_value - e.value <= tolerance
    ]
    return trace


def _draw_weights(rng: np.random.Generator, space: SearchSpace) -> Weights:
    while True:
        combo = rng.integers(space.low, space.high + 1, size=4)
        if combo.any():
            return Weights(*(int(v) for v in combo))


def random_search(
    spec: ObjectiveSpec,
    budget: int,
    seed: int = 0,
    space: SearchSpace | None = None,
) -> OptimizationTrace:
    """Uniform i.i.d. integer draws; the draw stream is a prefix-stable
    function of the seed, so a larger budget extends a smaller one."""
    if budget < 1:
        raise ConceptGaugeError(f"budget must be >= 1, got {budget}")
    space = space or SearchSpace()
    rng = np.random.default_rng(seed)
    trace = OptimizationTrace(strategy="random", seed=seed)
    for _ in range(budget):
        w = _draw_weights(rng, space)
        trace.record(w, evaluate_objective(spec, w))
    return trace


class _GaussianSurrogate:
    """GP with a fixed RBF kernel on sum-normalized weight vectors.

    The objective is invariant under weight rescaling, so the surrogate
    works on w/sum(w); duplicate inputs from scaled vectors are absorbed by
    the noise term.  No hyperparameter fitting keeps it fully deterministic.
    """

    def __init__(self, lengthscale: float = 0.15, noise: float = 1e-3):
        self.lengthscale = lengthscale
        self.noise = noise
        self._x: np.ndarray | None = None
        self._chol: np.ndarray | None = None
        self._alpha: np.ndarray | None = None
        self._y_mean = 0.0
        self._y_std = 1.0

    @staticmethod
    def features(weights: np.ndarray) -> np.ndarray:
        totals = weights.sum(axis=1, keepdims=True)
        return weights / totals

    def _kernel(self, a: np.ndarray, b: np.ndarray) -> np.ndarray:
        sq = ((a[:, None, :] - b[None, :, :]) ** 2).sum(axis=2)
        return np.exp(-0.5 * sq / self.lengthscale**2)

    def fit(self, weights: np.ndarray, values: np.ndarray) -> None:
        x = self.features(np.asarray(weights, dtype=float))
        y = np.asarray(values, dtype=float)
        self._y_mean = float(y.mean())
        std = float(y.std())
        self._y_std = std if std > 1e-12 else 1.0
        y_n = (y - self._y_mean) / self._y_std
        k = self._kernel(x, x)
        k[np.diag_indices_from(k)] += self.noise
        jitter = 0.0
        while True:
            try:
                self._chol = np.linalg.cholesky(
                    k + jitter * np.eye(len(k)) if jitter else k)
                break
            except np.linalg.LinAlgError:
                jitter = max(jitter * 10.0, 1e-8)
        self._x = x
        self._alpha = np.linalg.solve(
            self._chol.T, np.linalg.solve(self._chol, y_n))

    def predict(self, weights: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
        assert self._x is not None and self._chol is not None
        x = self.features(np.asarray(weights, dtype=float))
        k_star = self._kernel(x, self._x)
        mean = k_star @ self._alpha
        v = np.linalg.solve(self._chol, k_star.T)
        var = np.maximum(1.0 + self.noise - (v**2).sum(axis=0), 1e-12)
        return (mean * self._y_std + self._y_mean,
                np.sqrt(var) * self._y_std)


def _expected_improvement(
    mean: np.ndarray, std: np.ndarray, best: float, xi: float = 0.01
) -> np.ndarray:
    z = (mean - best - xi) / std
    return std * (z * ndtr(z) + np.exp(-0.5 * z * z) / np.sqrt(2 * np.pi))


def smbo_optimize(
    spec: ObjectiveSpec,
    budget: int = 200,
    seed: int = 0,
    init_points: int = 20,
    space: SearchSpace | None = None,
    n_candidates: int = 256,
) -> OptimizationTrace:
    """Propose-evaluate loop guided by the Gaussian surrogate.

    Candidates per round mix global uniform draws with integer perturbations
    of the incumbent best, so the search both explores and climbs plateaus.
    """
    if init_points < 2:
        raise ConceptGaugeError(f"init_points must be >= 2, got {init_points}")
    if budget <= init_points:
        raise ConceptGaugeError(
            f"budget {budget} must exceed init_points {init_points}")
    space = space or SearchSpace()
    rng = np.random.default_rng(seed)
    trace = OptimizationTrace(strategy="smbo", seed=seed)

    tried: list[np.ndarray] = []
    values: list[float] = []
    for _ in range(init_points):
        w = _draw_weights(rng, space)
        value = evaluate_objective(spec, w)
        trace.record(w, value)
        tried.append(np.array(w.as_tuple(), dtype=float))
        values.append(value)

    surrogate = _GaussianSurrogate()
    n_local = n_candidates // 3
    n_global = n_candidates - n_local
    while len(trace.evaluations) < budget:
        surrogate.fit(np.array(tried), np.array(values))
        best_entry = trace.best

        candidates = rng.integers(
            space.low, space.high + 1, size=(n_global, 4))
        center = np.array(best_entry.weights.as_tuple())
        local = np.rint(
            center + rng.normal(0.0, 10.0, size=(n_local, 4))
        ).astype(np.int64)
        candidates = np.vstack([candidates, local])
        candidates = np.clip(candidates, space.low, space.high)
        ok = candidates.any(axis=1)
        candidates = candidates[ok]

        mean, std = surrogate.predict(candidates.astype(float))
        ei = _expected_improvement(mean, std, best_entry.value)
        chosen = candidates[int(np.argmax(ei))]
        w = Weights(*(int(v) for v in chosen))
        value = evaluate_objective(spec, w)
        trace.record(w, value)
        tried.append(chosen.astype(float))
        values.append(value)

    return trace


STRATEGIES = ("grid", "random", "smbo")


def run_strategy(
    spec: ObjectiveSpec,
    strategy: str,
    step: int = 10,
    budget: int = 200,
    seed: int = 0,
    init_points: int = 20,
) -> OptimizationTrace:
    if strategy == "grid":
        return grid_search(spec, step=step)
    if strategy == "random":
        return random_search(spec, budget=budget, seed=seed)
    if strategy == "smbo":
        return smbo_optimize(spec, budget=budget, seed=seed,
                             init_points=init_points)
    raise ConceptGaugeError(
        f"unknown strategy {strategy!r}; expected one of {STRATEGIES}")
