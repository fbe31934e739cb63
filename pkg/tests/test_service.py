from __future__ import annotations

import json
from pathlib import Path

import pytest
from fastapi.testclient import TestClient

from conceptgauge.optimize import ObjectiveSpec, evaluate_objective
from conceptgauge.reliability import matrix_from_records
from conceptgauge.scoring import INITIAL_WEIGHTS, Weights, bucketize, rescore_rows
from conceptgauge.service import create_app
from conceptgauge.workspace import RunConfig, Workspace

from .test_workflow import TARGET_WEIGHTS, synthetic_rows

CONTRACT = json.loads(
    (Path(__file__).parent.parent / "frontend" / "fixtures" /
     "api-contract.json").read_text(encoding="utf-8"))


@pytest.fixture
def workspace(tmp_path) -> Workspace:
    ws = Workspace(tmp_path / "ws", RunConfig(pool_size=50, seed=1))
    ws.start_iteration(synthetic_rows(), INITIAL_WEIGHTS, seed=1)
    return ws


@pytest.fixture
def client(workspace) -> TestClient:
    return TestClient(create_app(workspace))


def same_shape(expected, actual) -> None:
    """Recursive key/type containment check of actual against the contract."""
    if isinstance(expected, dict):
        assert isinstance(actual, dict)
        for key, value in expected.items():
            assert key in actual, f"missing key {key!r}"
            if actual[key] is not None and value is not None:
                same_shape(value, actual[key])
    elif isinstance(expected, list):
        assert isinstance(actual, list)
        if expected and actual:
            same_shape(expected[0], actual[0])
    elif isinstance(expected, bool):
        assert isinstance(actual, bool)
    elif isinstance(expected, (int, float)):
        assert isinstance(actual, (int, float))
    else:
        assert isinstance(actual, type(expected))


def rate_everything(client, workspace, rater="P3") -> None:
    rows = workspace.scored_rows()
    buckets = bucketize(rescore_rows(rows, TARGET_WEIGHTS))
    survey = client.get("/api/survey/1").json()
    level_for = {"Good": 5, "Moderate": 3, "Bad": 1}
    for item in survey["items"]:
        resp = client.post("/api/ratings", json={
            "iteration": 1, "raterId": rater, "cui": item["cui"],
            "level": level_for[buckets[item["cui"]]]})
        assert resp.status_code == 200


def test_iterations_listing(client):
    resp = client.get("/api/iterations")
    assert resp.status_code == 200
    payload = resp.json()
    assert len(payload) == 1
    same_shape(CONTRACT["iterations"][0], payload[0])
    assert payload[0]["iteration"] == 1
    assert payload[0]["status"] == "open"
    assert payload[0]["weights"] == [20, 25, 25, 30]


def test_survey_payload_is_blind(client):
    resp = client.get("/api/survey/1")
    assert resp.status_code == 200
    payload = resp.json()
    same_shape(CONTRACT["survey"], payload)
    assert len(payload["items"]) == 50
    for item in payload["items"]:
        assert set(item) == {"cui", "term"}
    # no score-like field anywhere in the payload
    text = json.dumps(payload).lower()
    for forbidden in ('"gs"', "score", "bucket", "factor", "rank"):
        assert forbidden not in text
    assert payload["levels"] == CONTRACT["levels"]


def test_survey_revisit_shows_own_choices(client):
    survey = client.get("/api/survey/1").json()
    cui = survey["items"][0]["cui"]
    client.post("/api/ratings", json={
        "iteration": 1, "raterId": "P1", "cui": cui, "level": 4})
    client.post("/api/ratings", json={
        "iteration": 1, "raterId": "P1", "cui": cui, "level": 5})

    revisit = client.get("/api/survey/1", params={"raterId": "P1"}).json()
    contract = dict(CONTRACT["surveyWithRatings"])
    contract.pop("ratings")  # map keys are data, not schema
    same_shape(contract, revisit)
    assert revisit["ratings"] == {cui: "5"}  # last write wins
    # own choices leak nothing about the metric
    text = json.dumps(revisit).lower()
    for forbidden in ('"gs"', "score", "bucket", "factor", "rank"):
        assert forbidden not in text
    # other raters see none of it
    other = client.get("/api/survey/1", params={"raterId": "P2"}).json()
    assert other["ratings"] == {}


def test_unknown_iteration_is_404(client):
    assert client.get("/api/survey/99").status_code == 404
    assert client.get("/api/report/99").status_code == 404


def test_rating_read_your_writes(client, workspace):
    survey = client.get("/api/survey/1").json()
    cui = survey["items"][0]["cui"]
    resp = client.post("/api/ratings", json={
        "iteration": 1, "raterId": "P1", "cui": cui, "level": 5})
    assert resp.status_code == 200
    same_shape(CONTRACT["ratingResponse"], resp.json())
    assert resp.json()["bucket"] == "Good"

    report = client.get("/api/report/1")
    assert report.status_code == 200
    payload = report.json()
    same_shape(CONTRACT["report"], payload)
    assert payload["histograms"]["P1"]["counts"]["Good"] == 1

    # last write wins
    client.post("/api/ratings", json={
        "iteration": 1, "raterId": "P1", "cui": cui, "level": 1})
    payload = client.get("/api/report/1").json()
    assert payload["histograms"]["P1"]["counts"]["Good"] == 0
    assert payload["histograms"]["P1"]["counts"]["Bad"] == 1


def test_rating_accepts_bucket_labels(client):
    survey = client.get("/api/survey/1").json()
    cui = survey["items"][1]["cui"]
    resp = client.post("/api/ratings", json={
        "iteration": 1, "raterId": "P1", "cui": cui, "level": "Moderate"})
    assert resp.status_code == 200
    assert resp.json()["bucket"] == "Moderate"


def test_rating_validation_errors(client):
    survey = client.get("/api/survey/1").json()
    cui = survey["items"][0]["cui"]
    # out-of-range level -> 400
    resp = client.post("/api/ratings", json={
        "iteration": 1, "raterId": "P1", "cui": cui, "level": 6})
    assert resp.status_code == 400
    # unknown concept -> 400
    resp = client.post("/api/ratings", json={
        "iteration": 1, "raterId": "P1", "cui": "NOPE", "level": 5})
    assert resp.status_code == 400
    # malformed body -> 4xx client error
    resp = client.post("/api/ratings", json={"iteration": 1})
    assert 400 <= resp.status_code < 500
    # unknown iteration -> 404
    resp = client.post("/api/ratings", json={
        "iteration": 42, "raterId": "P1", "cui": cui, "level": 5})
    assert resp.status_code == 404


def test_advance_without_ratings_conflicts(client):
    resp = client.post("/api/advance", json={
        "strategy": "random", "budget": 10, "seed": 0})
    assert resp.status_code == 409


def test_advance_improves_objective(client, workspace):
    rate_everything(client, workspace, rater="P3")
    rows = workspace.scored_rows()

    resp = client.post("/api/advance", json={
        "strategy": "smbo", "budget": 60, "seed": 11, "initPoints": 10})
    assert resp.status_code == 200
    payload = resp.json()
    same_shape(CONTRACT["advanceResponse"], payload)
    assert payload["iteration"] == 2
    new_weights = Weights(*payload["weights"])

    # oracle: the returned weights score the collected ratings at least as
    # well as the weights used before the advance
    ratings = workspace.ratings(1)
    reference = matrix_from_records(
        (r, cui, v) for (r, cui), v in ratings.cells.items())
    spec = ObjectiveSpec.from_scored_rows(rows, reference)
    assert (evaluate_objective(spec, new_weights)
            >= evaluate_objective(spec, INITIAL_WEIGHTS))

    # the new iteration is live
    iterations = client.get("/api/iterations").json()
    assert [it["iteration"] for it in iterations] == [1, 2]
    assert iterations[0]["status"] == "frozen"
    assert iterations[1]["status"] == "open"

    # rating the frozen round now conflicts
    cui = client.get("/api/survey/1").json()["items"][0]["cui"]
    resp = client.post("/api/ratings", json={
        "iteration": 1, "raterId": "P9", "cui": cui, "level": 5})
    assert resp.status_code == 409


def test_advance_respects_requested_rater(client, workspace):
    rate_everything(client, workspace, rater="P3")
    resp = client.post("/api/advance", json={
        "strategy": "random", "budget": 10, "seed": 0, "raterId": "GHOST"})
    assert resp.status_code == 400
