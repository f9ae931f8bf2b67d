"""The RESTful backend orchestrating the full fact-checking pipeline.

Request flow for a claim: search the configured backend for the top-10
pages, extract each article (skipping failures), keep sentences above the
0.75 similarity threshold, classify the surviving snippet sets with the
credibility model, and return the verdict with attention-weighted
evidence.  Whole-article requests first rank sentences by
check-worthiness and fact-check the top one.

User feedback is appended to a JSON-lines log, one durable line per
record.  Models and embedding tables are shared read-only across
requests; the log is the only mutable shared resource and is serialized
by an exclusive append lock.
"""

import json
import os
import secrets
import threading
from dataclasses import dataclass, field
from datetime import datetime, timezone
from pathlib import Path

from . import checkpoint as ckpt
from . import retrieval, sadhan, worthiness
from .retrieval import ExtractionError, RetrievalError
from .textproc import ASPECT_KINDS, Claim, tokenize

SEARCH_K = 10
VERDICT_CUT = 0.5


@dataclass
class ServiceConfig:
    """Service configuration, normally read from the environment."""

    bind_addr: str = "127.0.0.1:8080"
    sadhan_ckpt: str | None = None
    worthiness_ckpt: str | None = None
    embeddings_path: str | None = None
    search_backend: str = "fixture"
    search_api_key: str | None = None
    search_endpoint: str | None = None
    fixture_dir: str | None = None
    feedback_log: str = "feedback.jsonl"
    cors_origins: list[str] = field(default_factory=lambda: ["*"])
    snippet_threshold: float = retrieval.DEFAULT_SNIPPET_THRESHOLD

    @classmethod
    def from_env(cls, env=None) -> "ServiceConfig":
        env = env if env is not None else os.environ
        cfg = cls()
        cfg.bind_addr = env.get("BIND_ADDR", cfg.bind_addr)
        cfg.sadhan_ckpt = env.get("SADHAN_CKPT")
        cfg.worthiness_ckpt = env.get("WORTHINESS_CKPT")
        cfg.embeddings_path = env.get("EMBEDDINGS_PATH")
        cfg.search_backend = env.get("SEARCH_BACKEND", cfg.search_backend)
        cfg.search_api_key = env.get("SEARCH_API_KEY")
        cfg.search_endpoint = env.get("SEARCH_ENDPOINT")
        cfg.fixture_dir = env.get("FIXTURE_DIR")
        cfg.feedback_log = env.get("FEEDBACK_LOG", cfg.feedback_log)
        if env.get("CORS_ORIGINS"):
            cfg.cors_origins = [o.strip() for o in env["CORS_ORIGINS"].split(",")]
        return cfg


class PipelineError(Exception):
    """Pipeline failure mapped to an HTTP status by the API layer."""

    def __init__(self, message: str, status: int):
        super().__init__(message)
        self.status = status


class FeedbackLog:
    """Append-only JSON-lines log; each record is flushed and fsynced
    before the caller acknowledges it."""

    def __init__(self, path: str | Path):
        self.path = Path(path)
        self._lock = threading.Lock()

    def append(self, record: dict) -> None:
        line = json.dumps(record, ensure_ascii=False) + "\n"
        with self._lock:
            with open(self.path, "a", encoding="utf-8") as fh:
                fh.write(line)
                fh.flush()
                os.fsync(fh.fileno())


class Pipeline:
    """Loaded models plus the orchestration logic, independent of HTTP."""

    def __init__(self, config: ServiceConfig):
        self.config = config
        self.missing: list[str] = []
        self.sadhan_params = None
        self.table = None
        self.sadhan_id = None
        self.worthiness_model = None
        self.worthiness_id = None
        self.backend = None
        self.backend_error: str | None = None

        if config.sadhan_ckpt and Path(config.sadhan_ckpt).exists():
            self.sadhan_params, self.table, self.sadhan_id = ckpt.load_sadhan(
                config.sadhan_ckpt)
        else:
            self.missing.append("sadhan_checkpoint")
        if config.worthiness_ckpt and Path(config.worthiness_ckpt).exists():
            self.worthiness_model, self.worthiness_id = ckpt.load_worthiness(
                config.worthiness_ckpt)
        else:
            self.missing.append("worthiness_checkpoint")
        # An explicit embeddings file overrides the table stored in the
        # credibility checkpoint (e.g. to run with full-size vectors).
        if config.embeddings_path and self.table is not None:
            from .textproc import load_embeddings
            with open(config.embeddings_path, encoding="utf-8") as fh:
                self.table = load_embeddings(fh, self.table.vocab, self.table.dim)
        try:
            self.backend = retrieval.make_backend(
                config.search_backend,
                fixture_dir=config.fixture_dir,
                endpoint=config.search_endpoint,
                api_key=config.search_api_key,
            )
        except RetrievalError as exc:
            self.backend_error = str(exc)
            self.missing.append("search_backend")

        self.feedback = FeedbackLog(config.feedback_log)
        self._requests: dict[str, str] = {}  # request id -> claim text
        self._requests_lock = threading.Lock()

    # -- request registry ---------------------------------------------------

    def _register(self, claim_text: str) -> str:
        request_id = secrets.token_hex(16)
        with self._requests_lock:
            self._requests[request_id] = claim_text
        return request_id

    def known_claim(self, request_id: str) -> str | None:
        with self._requests_lock:
            return self._requests.get(request_id)

    # -- health -------------------------------------------------------------

    def health(self) -> dict:
        return {
            "status": "ok" if not self.missing else "degraded",
            "models": {"sadhan": self.sadhan_id, "worthiness": self.worthiness_id},
            "backend": getattr(self.backend, "mode", None),
            "missing": list(self.missing),
        }

    # -- claim analysis -----------------------------------------------------

    def _require_models(self, names: list[str]) -> None:
        absent = [n for n in names if n in self.missing]
        if absent:
            raise PipelineError(f"model not loaded: {', '.join(absent)}", status=503)
        if self.backend is None:
            raise PipelineError(f"search backend unavailable: {self.backend_error}",
                                status=503)

    def analyze_claim(self, claim_text: str, aspects: dict[str, str] | None = None,
                      page_url: str | None = None) -> dict:
        self._require_models(["sadhan_checkpoint"])
        claim = Claim(claim_text.strip(), aspects=aspects or {})
        try:
            results = self.backend.search(claim.text, k=SEARCH_K)
        except RetrievalError as exc:
            raise PipelineError(f"search backend failure: {exc}", status=502) from exc

        evidence_entries = []  # (article, snippets, kept sentence indices)
        for result in results:
            try:
                article = retrieval.extract_article(result)
            except ExtractionError:
                continue  # one bad page never fails the request
            snippets = retrieval.filter_snippets(
                claim, article, self.config.snippet_threshold, table=self.table)
            if snippets:
                kept = [i for s in snippets for i in range(s.start, s.end + 1)]
                evidence_entries.append((article, snippets, kept))

        request_id = self._register(claim.text)
        base = {
            "request_id": request_id,
            "claim": claim.text,
            "model": {
                "sadhan": self.sadhan_id,
                "worthiness": self.worthiness_id,
                "format_version": ckpt.FORMAT_VERSION,
                "backend": getattr(self.backend, "mode", None),
            },
        }
        if not evidence_entries:
            return {**base, "verdict": "unverifiable", "credibility_score": None,
                    "evidence": []}

        docs = [[tokenize(article.sentences[i].text) for i in kept]
                for article, _, kept in evidence_entries]
        result = sadhan.predict(claim, docs, self.sadhan_params, self.table)

        evidence_payload = []
        for (article, snippets, kept), attn, doc_tokens in zip(
                evidence_entries, result.attention_maps, docs):
            # kept positions -> position inside the model document
            pos_of = {doc_index: k for k, doc_index in enumerate(attn.sentence_indices)}
            snippet_payload = []
            for snippet in snippets:
                sentence_payload = []
                for i in range(snippet.start, snippet.end + 1):
                    k = pos_of[kept.index(i)]
                    sentence_payload.append({
                        "text": article.sentences[i].text,
                        "intensity": float(attn.intensities[k]),
                        "word_weights": [
                            [tok, float(w)]
                            for tok, w in zip(doc_tokens[kept.index(i)],
                                              attn.word_weights[k])
                        ],
                    })
                snippet_payload.append({
                    "text": snippet.text,
                    "similarity": snippet.similarity,
                    "sentences": sentence_payload,
                })
            evidence_payload.append({
                "url": article.url,
                "title": article.title,
                "snippets": snippet_payload,
            })

        verdict = "true" if result.score >= VERDICT_CUT else "false"
        payload = {**base, "verdict": verdict,
                   "credibility_score": result.score,
                   "evidence": evidence_payload}
        if result.aspect_probabilities is not None:
            payload["aspect_probabilities"] = result.aspect_probabilities
        return payload

    # -- whole-article analysis ----------------------------------------------

    def analyze_article(self, article_url: str | None, article_text: str | None,
                        claim_threshold: float, top_k: int) -> dict:
        self._require_models(["sadhan_checkpoint", "worthiness_checkpoint"])
        if article_text:
            try:
                article = retrieval.article_from_text(article_text)
            except ExtractionError as exc:
                raise PipelineError(str(exc), status=422) from exc
        else:
            try:
                page = self.backend.fetch_page(article_url)
                article = retrieval.extract_article(page)
            except (RetrievalError, ExtractionError) as exc:
                raise PipelineError(
                    f"could not fetch or extract article: {exc}", status=422) from exc

        ranked = worthiness.rank_claims(
            self.worthiness_model, article, claim_threshold, top_k)
        claims_payload = [
            {"sentence": s.sentence.text, "index": s.sentence.index,
             "score": s.score, "selected": rank == 0}
            for rank, s in enumerate(ranked)
        ]
        analysis = None
        if ranked:
            analysis = self.analyze_claim(ranked[0].sentence.text)
        return {
            "request_id": self._register(article.url),
            "claims": claims_payload,
            "analysis": analysis,
        }

    # -- feedback -------------------------------------------------------------

    def submit_feedback(self, request_id: str, kind: str, agree: bool,
                        text: str | None) -> dict:
        claim_text = self.known_claim(request_id)
        if claim_text is None:
            raise PipelineError(f"unknown request id: {request_id}", status=404)
        record = {
            "request_id": request_id,
            "kind": kind,
            "agree": agree,
            "text": text,
            "timestamp": datetime.now(timezone.utc).isoformat(),
            "claim": claim_text,
        }
        self.feedback.append(record)
        return {"status": "recorded", "request_id": request_id}


# ---------------------------------------------------------------------------
# FastAPI layer
# ---------------------------------------------------------------------------

def create_app(config: ServiceConfig | None = None):
    from fastapi import FastAPI, HTTPException
    from fastapi.middleware.cors import CORSMiddleware
    from pydantic import BaseModel, Field, field_validator, model_validator

    config = config or ServiceConfig.from_env()
    pipeline = Pipeline(config)

    class ClaimRequest(BaseModel):
        claim_text: str
        page_url: str | None = None
        aspects: dict[str, str] | None = None

        @field_validator("claim_text")
        @classmethod
        def _nonempty(cls, v: str) -> str:
            if not v.strip():
                raise ValueError("claim_text must be non-empty")
            return v

        @field_validator("aspects")
        @classmethod
        def _known_kinds(cls, v):
            if v:
                bad = set(v) - set(ASPECT_KINDS)
                if bad:
                    raise ValueError(f"unknown aspect kinds: {sorted(bad)}")
            return v

    class ArticleRequest(BaseModel):
        article_url: str | None = None
        article_text: str | None = None
        claim_threshold: float = Field(default=0.5, ge=0.0, le=1.0)
        top_k: int = Field(default=5, ge=1)

        @model_validator(mode="after")
        def _exactly_one_source(self):
            if bool(self.article_url) == bool(self.article_text):
                raise ValueError(
                    "exactly one of article_url or article_text must be provided")
            return self

    class FeedbackRequest(BaseModel):
        request_id: str
        kind: str
        agree: bool
        text: str | None = None

        @field_validator("kind")
        @classmethod
        def _known_kind(cls, v: str) -> str:
            if v not in ("verdict", "claim_score"):
                raise ValueError("kind must be 'verdict' or 'claim_score'")
            return v

    app = FastAPI(title="brenda", version="0.1.0")
    app.add_middleware(
        CORSMiddleware,
        allow_origins=config.cors_origins,
        allow_methods=["*"],
        allow_headers=["*"],
    )
    app.state.pipeline = pipeline

    def _run(fn, *args):
        try:
            return fn(*args)
        except PipelineError as exc:
            raise HTTPException(status_code=exc.status, detail=str(exc)) from exc
        except ValueError as exc:
            raise HTTPException(status_code=400, detail=str(exc)) from exc

    @app.post("/api/v1/analyze/claim")
    def analyze_claim(req: ClaimRequest):
        return _run(pipeline.analyze_claim, req.claim_text, req.aspects, req.page_url)

    @app.post("/api/v1/analyze/article")
    def analyze_article(req: ArticleRequest):
        return _run(pipeline.analyze_article, req.article_url, req.article_text,
                    req.claim_threshold, req.top_k)

    @app.post("/api/v1/feedback")
    def submit_feedback(req: FeedbackRequest):
        return _run(pipeline.submit_feedback, req.request_id, req.kind,
                    req.agree, req.text)

    @app.get("/api/v1/health")
    def health():
        return pipeline.health()

    return app


def main() -> None:
    """Run the service under uvicorn using environment configuration."""
    import uvicorn

    config = ServiceConfig.from_env()
    host, _, port = config.bind_addr.partition(":")
    uvicorn.run(create_app(config), host=host or "127.0.0.1",
                port=int(port or 8080))


if __name__ == "__main__":
    main()
