"""Run the REST service end to end against the offline fixture corpus.

Trains/initializes both models, writes checkpoints, boots the service in
a background thread, then walks the four endpoints: health, claim
analysis (verdict + attention-highlighted evidence), whole-article
analysis (check-worthiness ranking) and feedback logging.
"""

import json
import tempfile
import threading
import time
from pathlib import Path

import requests
import uvicorn

from brenda import checkpoint, sadhan, worthiness
from brenda.nn import TrainConfig
from brenda.retrieval import SearchResult, extract_article
from brenda.sadhan import SadhanDims, SadhanParams
from brenda.service import ServiceConfig, create_app
from brenda.textproc import EmbeddingTable, build_vocabulary, tokenize

ROOT = Path(__file__).resolve().parent.parent
CORPUS = ROOT / "tests" / "fixtures" / "corpus"
PORT = 8765

workdir = Path(tempfile.mkdtemp(prefix="brenda-demo-"))
print(f"working directory: {workdir}")

# -- models -----------------------------------------------------------------
print("preparing models ...")
corpus_tokens = []
for page in sorted(CORPUS.glob("*.html")):
    article = extract_article(SearchResult(f"fixture://{page.name}", "",
                                           page.read_text(), 1))
    corpus_tokens += [tokenize(s.text) for s in article.sentences]
table = EmbeddingTable.random(build_vocabulary(corpus_tokens, 1), 16, seed=11)

dims = SadhanDims(embed_dim=16, hidden=8, aspect_dim=8, att_dim=16)
params = SadhanParams.init(dims, {"topic": ["health"]}, seed=21)
checkpoint.save_sadhan(workdir / "sadhan.npz", params, table)

wconfig = TrainConfig(learning_rate=0.005, keep_prob=1.0, epochs=80,
                      batch_size=16, seed=13, optimizer="adam")
wmodel = worthiness.train_worthiness(
    worthiness.generate_synthetic_corpus(60, seed=13), wconfig,
    hidden_size=16, embed_dim=16).model
checkpoint.save_worthiness(workdir / "worthiness.npz", wmodel)

# -- service ----------------------------------------------------------------
config = ServiceConfig(
    bind_addr=f"127.0.0.1:{PORT}",
    sadhan_ckpt=str(workdir / "sadhan.npz"),
    worthiness_ckpt=str(workdir / "worthiness.npz"),
    search_backend="fixture",
    fixture_dir=str(CORPUS),
    feedback_log=str(workdir / "feedback.jsonl"),
)
server = uvicorn.Server(uvicorn.Config(create_app(config), host="127.0.0.1",
                                       port=PORT, log_level="warning"))
threading.Thread(target=server.run, daemon=True).start()

base = f"http://127.0.0.1:{PORT}/api/v1"
for _ in range(50):
    try:
        requests.get(f"{base}/health", timeout=1)
        break
    except requests.ConnectionError:
        time.sleep(0.1)

print("\nGET /health ->", json.dumps(requests.get(f"{base}/health").json()))

claim = "Covid-19 can be cured by drinking bleach."
print(f"\nPOST /analyze/claim  claim={claim!r}")
body = requests.post(f"{base}/analyze/claim", json={"claim_text": claim}).json()
print(f"  verdict={body['verdict']}  score={body['credibility_score']:.3f}  "
      f"evidence sources={len(body['evidence'])}")
for source in body["evidence"][:2]:
    for snippet in source["snippets"]:
        for sentence in snippet["sentences"]:
            print(f"    [{sentence['intensity']:.2f}] {sentence['text']} "
                  f"({source['url']})")

article = ("Crime dropped 30 percent after the reform passed. "
           "What a wonderful morning to walk along the river. "
           "The city allocated 12 million dollars to schools.")
print("\nPOST /analyze/article (inline text, threshold 0.0, top_k 2)")
body2 = requests.post(f"{base}/analyze/article", json={
    "article_text": article, "claim_threshold": 0.0, "top_k": 2}).json()
for c in body2["claims"]:
    marker = "*" if c["selected"] else " "
    print(f"  {marker} {c['score']:.3f} {c['sentence']}")

print("\nPOST /feedback (disagree with the verdict)")
ack = requests.post(f"{base}/feedback", json={
    "request_id": body["request_id"], "kind": "verdict", "agree": False,
    "text": "demo feedback"}).json()
print("  ->", ack)
print("  log line:",
      (workdir / "feedback.jsonl").read_text().strip().splitlines()[-1][:100], "...")

server.should_exit = True
print("\ndone.")
