"""REST API contract: schemas, error paths, feedback log, determinism."""

import json
from concurrent.futures import ThreadPoolExecutor

import pytest
from fastapi.testclient import TestClient

from brenda.retrieval import RetrievalError
from brenda.service import FeedbackLog, Pipeline, ServiceConfig, create_app

from conftest import NO_OVERLAP_CLAIM, VERBATIM_CLAIM


def make_config(corpus_dir, checkpoints, feedback_path) -> ServiceConfig:
    return ServiceConfig(
        sadhan_ckpt=str(checkpoints["sadhan"]),
        worthiness_ckpt=str(checkpoints["worthiness"]),
        search_backend="fixture",
        fixture_dir=str(corpus_dir),
        feedback_log=str(feedback_path),
    )


@pytest.fixture()
def app_config(corpus_dir, service_checkpoints, tmp_path):
    return make_config(corpus_dir, service_checkpoints, tmp_path / "feedback.jsonl")


@pytest.fixture()
def client(app_config):
    return TestClient(create_app(app_config))


class TestHealth:
    def test_fully_configured_ok(self, client):
        body = client.get("/api/v1/health").json()
        assert body["status"] == "ok"
        assert body["backend"] == "fixture"
        assert body["models"]["sadhan"]
        assert body["models"]["worthiness"]
        assert body["missing"] == []

    def test_missing_checkpoint_degraded(self, corpus_dir, tmp_path):
        config = ServiceConfig(search_backend="fixture",
                               fixture_dir=str(corpus_dir),
                               feedback_log=str(tmp_path / "fb.jsonl"))
        body = TestClient(create_app(config)).get("/api/v1/health").json()
        assert body["status"] == "degraded"
        assert "sadhan_checkpoint" in body["missing"]
        assert "worthiness_checkpoint" in body["missing"]


class TestAnalyzeClaim:
    def test_verbatim_claim_yields_evidence(self, client):
        resp = client.post("/api/v1/analyze/claim",
                           json={"claim_text": VERBATIM_CLAIM})
        assert resp.status_code == 200
        body = resp.json()
        assert body["verdict"] in ("true", "false")
        assert 0.0 <= body["credibility_score"] <= 1.0
        assert len(body["evidence"]) >= 1
        covid = [e for e in body["evidence"]
                 if e["url"] == "https://factcheck.example.org/covid-bleach"]
        assert covid, "the verbatim page must appear as evidence"
        top = covid[0]["snippets"][0]
        assert top["similarity"] == pytest.approx(1.0, abs=1e-9)
        assert body["request_id"]
        assert body["model"]["backend"] == "fixture"

    def test_zero_overlap_claim_unverifiable(self, client):
        body = client.post("/api/v1/analyze/claim",
                           json={"claim_text": NO_OVERLAP_CLAIM}).json()
        assert body["verdict"] == "unverifiable"
        assert body["credibility_score"] is None
        assert body["evidence"] == []

    def test_intensities_in_unit_interval_with_max_one(self, client):
        body = client.post("/api/v1/analyze/claim",
                           json={"claim_text": VERBATIM_CLAIM}).json()
        for source in body["evidence"]:
            intensities = [s["intensity"] for snip in source["snippets"]
                           for s in snip["sentences"]]
            assert all(0.0 <= i <= 1.0 for i in intensities)
            assert max(intensities) == 1.0

    def test_word_weights_align_with_tokens(self, client):
        body = client.post("/api/v1/analyze/claim",
                           json={"claim_text": VERBATIM_CLAIM}).json()
        sentence = body["evidence"][0]["snippets"][0]["sentences"][0]
        assert sentence["word_weights"]
        for token, weight in sentence["word_weights"]:
            assert isinstance(token, str) and 0.0 <= weight <= 1.0
        total = sum(w for _, w in sentence["word_weights"])
        assert total == pytest.approx(1.0, abs=1e-6)

    def test_aspects_accepted_and_reported(self, client):
        body = client.post("/api/v1/analyze/claim", json={
            "claim_text": VERBATIM_CLAIM, "aspects": {"topic": "health"},
        }).json()
        assert set(body["aspect_probabilities"]) == {"topic"}

    def test_unknown_aspect_rejected(self, client):
        resp = client.post("/api/v1/analyze/claim", json={
            "claim_text": VERBATIM_CLAIM, "aspects": {"publisher": "x"}})
        assert resp.status_code == 422

    def test_empty_claim_rejected(self, client):
        assert client.post("/api/v1/analyze/claim",
                           json={"claim_text": "   "}).status_code == 422

    def test_identical_requests_identical_bodies_modulo_request_id(self, client):
        bodies = []
        for _ in range(2):
            body = client.post("/api/v1/analyze/claim",
                               json={"claim_text": VERBATIM_CLAIM}).json()
            body.pop("request_id")
            bodies.append(json.dumps(body, sort_keys=True))
        assert bodies[0] == bodies[1]

    def test_search_failure_maps_to_502(self, app_config):
        app = create_app(app_config)
        def boom(claim_text, k=10):
            raise RetrievalError("quota exhausted", status=429)
        app.state.pipeline.backend.search = boom
        resp = TestClient(app).post("/api/v1/analyze/claim",
                                    json={"claim_text": "anything at all"})
        assert resp.status_code == 502

    def test_single_page_failure_tolerated(self, service_checkpoints, tmp_path):
        # One unparseable page among the results never fails the request.
        fixture_dir = tmp_path / "corpus"
        fixture_dir.mkdir()
        (fixture_dir / "good.html").write_text(
            "<html><title>G</title><body><p>Covid-19 can be cured by drinking "
            "bleach. Officials debunked it.</p></body></html>")
        (fixture_dir / "broken.html").write_text(
            "<html><title>covid-19 bleach cured drinking</title><body></body></html>")
        config = make_config(fixture_dir, service_checkpoints,
                             tmp_path / "fb.jsonl")
        client = TestClient(create_app(config))
        resp = client.post("/api/v1/analyze/claim",
                           json={"claim_text": VERBATIM_CLAIM})
        assert resp.status_code == 200
        assert resp.json()["verdict"] in ("true", "false")

    def test_model_not_loaded_maps_to_503(self, corpus_dir, tmp_path):
        config = ServiceConfig(search_backend="fixture",
                               fixture_dir=str(corpus_dir),
                               feedback_log=str(tmp_path / "fb.jsonl"))
        resp = TestClient(create_app(config)).post(
            "/api/v1/analyze/claim", json={"claim_text": "anything"})
        assert resp.status_code == 503


ARTICLE_TEXT = (
    "Crime dropped 30 percent after the reform passed. "
    "What a wonderful morning to walk along the river. "
    "Hopefully the weather stays pleasant for the picnic. "
    "The city allocated 12 million dollars to schools."
)


class TestAnalyzeArticle:
    def test_inline_text_threshold_zero_top_three(self, client):
        body = client.post("/api/v1/analyze/article", json={
            "article_text": ARTICLE_TEXT, "claim_threshold": 0.0, "top_k": 3,
        }).json()
        assert len(body["claims"]) == 3
        scores = [c["score"] for c in body["claims"]]
        assert scores == sorted(scores, reverse=True)
        assert body["claims"][0]["selected"] is True
        assert all(not c["selected"] for c in body["claims"][1:])
        assert body["analysis"]["claim"] == body["claims"][0]["sentence"]

    def test_planted_claim_ranked_first(self, client):
        body = client.post("/api/v1/analyze/article", json={
            "article_text": ARTICLE_TEXT, "claim_threshold": 0.0, "top_k": 4,
        }).json()
        assert body["claims"][0]["index"] in (0, 3)  # the two planted claims
        assert body["claims"][0]["score"] > 0.5

    def test_impossible_threshold_empty_no_analysis(self, client):
        body = client.post("/api/v1/analyze/article", json={
            "article_text": ARTICLE_TEXT, "claim_threshold": 1.0, "top_k": 5,
        }).json()
        assert body["claims"] == []
        assert body["analysis"] is None

    def test_fixture_url_fetch(self, client):
        body = client.post("/api/v1/analyze/article", json={
            "article_url": "https://citynews.example.com/bridge",
            "claim_threshold": 0.0, "top_k": 2,
        }).json()
        assert len(body["claims"]) == 2

    def test_unknown_url_maps_to_422(self, client):
        resp = client.post("/api/v1/analyze/article", json={
            "article_url": "https://nowhere.example.com/missing"})
        assert resp.status_code == 422

    def test_exactly_one_source_required(self, client):
        assert client.post("/api/v1/analyze/article", json={}).status_code == 422
        assert client.post("/api/v1/analyze/article", json={
            "article_url": "https://a.example.com/x", "article_text": "Both. Here.",
        }).status_code == 422

    def test_threshold_bounds_validated(self, client):
        assert client.post("/api/v1/analyze/article", json={
            "article_text": ARTICLE_TEXT, "claim_threshold": 1.5,
        }).status_code == 422


class TestFeedback:
    def analyze(self, client):
        return client.post("/api/v1/analyze/claim",
                           json={"claim_text": VERBATIM_CLAIM}).json()

    def test_round_trip_single_line(self, client, app_config):
        request_id = self.analyze(client)["request_id"]
        resp = client.post("/api/v1/feedback", json={
            "request_id": request_id, "kind": "verdict", "agree": False,
            "text": "verdict looks wrong"})
        assert resp.status_code == 200
        lines = open(app_config.feedback_log, encoding="utf-8").read().splitlines()
        assert len(lines) == 1
        record = json.loads(lines[0])
        assert record["request_id"] == request_id
        assert record["kind"] == "verdict"
        assert record["agree"] is False
        assert record["claim"] == VERBATIM_CLAIM
        assert record["timestamp"]

    def test_unknown_request_id_404_log_untouched(self, client, app_config):
        resp = client.post("/api/v1/feedback", json={
            "request_id": "f" * 32, "kind": "verdict", "agree": True})
        assert resp.status_code == 404
        assert not app_config.feedback_log or \
            not __import__("pathlib").Path(app_config.feedback_log).exists()

    def test_malformed_body_rejected(self, client):
        assert client.post("/api/v1/feedback", json={
            "request_id": "x", "kind": "mood", "agree": True}).status_code == 422
        assert client.post("/api/v1/feedback", json={
            "kind": "verdict"}).status_code == 422

    def test_hundred_concurrent_writers_intact_lines(self, client, app_config):
        request_id = self.analyze(client)["request_id"]

        def submit(i):
            return client.post("/api/v1/feedback", json={
                "request_id": request_id, "kind": "claim_score",
                "agree": i % 2 == 0, "text": f"writer-{i}"}).status_code

        with ThreadPoolExecutor(max_workers=32) as pool:
            statuses = list(pool.map(submit, range(100)))
        assert statuses == [200] * 100
        lines = open(app_config.feedback_log, encoding="utf-8").read().splitlines()
        assert len(lines) == 100
        writers = {json.loads(line)["text"] for line in lines}
        assert writers == {f"writer-{i}" for i in range(100)}

    def test_log_is_append_only(self, tmp_path):
        log = FeedbackLog(tmp_path / "log.jsonl")
        log.append({"a": 1})
        log.append({"b": 2})
        lines = (tmp_path / "log.jsonl").read_text().splitlines()
        assert [json.loads(l) for l in lines] == [{"a": 1}, {"b": 2}]


class TestCORSAndConfig:
    def test_cors_header_present(self, client):
        resp = client.get("/api/v1/health",
                          headers={"Origin": "chrome-extension://abcdef"})
        assert resp.headers.get("access-control-allow-origin") == "*"

    def test_config_from_env(self, corpus_dir, tmp_path):
        env = {
            "BIND_ADDR": "0.0.0.0:9999",
            "SEARCH_BACKEND": "fixture",
            "FIXTURE_DIR": str(corpus_dir),
            "FEEDBACK_LOG": str(tmp_path / "fb.jsonl"),
            "CORS_ORIGINS": "chrome-extension://abc, http://localhost:5173",
        }
        config = ServiceConfig.from_env(env)
        assert config.bind_addr == "0.0.0.0:9999"
        assert config.cors_origins == ["chrome-extension://abc",
                                       "http://localhost:5173"]
        assert Pipeline(config).health()["backend"] == "fixture"
