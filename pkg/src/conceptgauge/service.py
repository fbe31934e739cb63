"""JSON-over-HTTP service backing the survey UI.

Endpoints (all JSON bodies use lowerCamelCase):

    GET  /api/iterations          survey rounds and their status
    GET  /api/survey/{iteration}  the terms to rate — never any scores
    POST /api/ratings             {iteration, raterId, cui, level}
    GET  /api/report/{iteration}  agreement + histogram report
    POST /api/advance             {strategy, budget, seed, raterId?}

The service is a thin layer over Workspace: the advance endpoint composes
exactly the optimize/score/sample operations the CLI exposes.
"""

from __future__ import annotations

import logging
from pathlib import Path

from fastapi import FastAPI, HTTPException
from pydantic import BaseModel, Field

from .errors import ConceptGaugeError
from .reliability import BUCKET_ORDER, RATING_LABELS, map_rating
from .workspace import Workspace

logger = logging.getLogger(__name__)


class RatingBody(BaseModel):
    iteration: int
    raterId: str = Field(min_length=1)
    cui: str = Field(min_length=1)
    level: int | str


class AdvanceBody(BaseModel):
    strategy: str = "smbo"
    budget: int = 200
    seed: int = 0
    raterId: str | None = None
    step: int = 10
    initPoints: int = 20


def _normalize_level(level: int | str) -> tuple[str, str]:
    """Validate a rating level; returns (stored_value, bucket)."""
    if isinstance(level, str) and level in BUCKET_ORDER:
        return level, level
    try:
        numeric = int(level)
    except (TypeError, ValueError):
        raise HTTPException(
            status_code=400,
            detail=f"level must be 1..5 or one of {list(BUCKET_ORDER)}")
    try:
        bucket = map_rating(numeric)
    except ConceptGaugeError as exc:
        raise HTTPException(status_code=400, detail=str(exc))
    return str(numeric), bucket


def create_app(workspace: Workspace, static_dir: str | Path | None = None) -> FastAPI:
    app = FastAPI(title="conceptgauge survey service")

    @app.get("/api/iterations")
    def list_iterations() -> list[dict]:
        iterations = workspace.iterations()
        if not iterations:
            return []
        current = iterations[-1]
        out = []
        for n in iterations:
            meta = workspace.meta(n)
            ratings = workspace.ratings(n)
            out.append({
                "iteration": n,
                "status": "open" if n == current else "frozen",
                "weights": meta["weights"],
                "raters": list(ratings.raters),
                "ratingsCount": len(ratings.cells),
                "sampleSize": len(workspace.load_sample(n).concepts),
            })
        return out

    @app.get("/api/survey/{iteration}")
    def get_survey(iteration: int, raterId: str | None = None) -> dict:
        try:
            sample = workspace.load_sample(iteration)
        except ConceptGaugeError as exc:
            raise HTTPException(status_code=404, detail=str(exc))
        payload = {
            "iteration": iteration,
            "levels": [
                {"level": lvl, "label": label}
                for lvl, label in sorted(RATING_LABELS.items(), reverse=True)
            ],
            "items": [
                {"cui": cui, "term": sample.terms[cui]}
                for cui in sample.concepts
            ],
        }
        if raterId:
            # the rater's own stored choices for the revisit view; raw levels
            # only, never anything derived from the metric
            payload["ratings"] = workspace.stored_levels(iteration, raterId)
        return payload

    @app.post("/api/ratings")
    def post_rating(body: RatingBody) -> dict:
        stored_value, bucket = _normalize_level(body.level)
        try:
            workspace.add_rating(body.iteration, body.raterId, body.cui,
                                 stored_value)
        except ConceptGaugeError as exc:
            message = str(exc)
            status = 404 if "unknown iteration" in message else 400
            if "frozen" in message:
                status = 409
            raise HTTPException(status_code=status, detail=message)
        return {
            "iteration": body.iteration,
            "raterId": body.raterId,
            "cui": body.cui,
            "level": body.level,
            "bucket": bucket,
        }

    @app.get("/api/report/{iteration}")
    def get_report(iteration: int) -> dict:
        try:
            report = workspace.report(iteration)
        except ConceptGaugeError as exc:
            message = str(exc)
            status = 404 if "unknown iteration" in message else 409
            raise HTTPException(status_code=status, detail=message)
        return report.to_json_dict()

    @app.post("/api/advance")
    def post_advance(body: AdvanceBody) -> dict:
        try:
            weights, sample, trace = workspace.advance(
                strategy=body.strategy,
                budget=body.budget,
                seed=body.seed,
                rater_id=body.raterId,
                step=body.step,
                init_points=body.initPoints,
            )
        except ConceptGaugeError as exc:
            message = str(exc)
            status = 409 if "no ratings to fit" in message else 400
            raise HTTPException(status_code=status, detail=message)
        return {
            "iteration": sample.iteration,
            "weights": list(weights.as_tuple()),
            "bestValue": trace.best_value,
            "strategy": trace.strategy,
            "seed": trace.seed,
            "evaluations": len(trace.evaluations),
        }

    if static_dir is not None and Path(static_dir).is_dir():
        from fastapi.staticfiles import StaticFiles

        app.mount("/", StaticFiles(directory=str(static_dir), html=True),
                  name="ui")

    return app
