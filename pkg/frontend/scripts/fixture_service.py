"""Boot a fixture-mode service instance for the extension's tests.

Builds both model checkpoints in a temp directory (seeded, so every run
serves the same models) and runs the API against the bundled HTML corpus.
"""

import argparse
import sys
import tempfile
from pathlib import Path

import uvicorn

ROOT = Path(__file__).resolve().parent.parent.parent
sys.path.insert(0, str(ROOT / "src"))

from brenda import checkpoint, worthiness  # noqa: E402
from brenda.nn import TrainConfig  # noqa: E402
from brenda.retrieval import SearchResult, extract_article  # noqa: E402
from brenda.sadhan import SadhanDims, SadhanParams  # noqa: E402
from brenda.service import ServiceConfig, create_app  # noqa: E402
from brenda.textproc import EmbeddingTable, build_vocabulary, tokenize  # noqa: E402

CORPUS = ROOT / "tests" / "fixtures" / "corpus"


def main() -> None:
    parser = argparse.ArgumentParser()
    parser.add_argument("--port", type=int, default=8791)
    args = parser.parse_args()

    workdir = Path(tempfile.mkdtemp(prefix="brenda-ext-test-"))
    corpus_tokens = []
    for page in sorted(CORPUS.glob("*.html")):
        article = extract_article(
            SearchResult(f"fixture://{page.name}", "", page.read_text(), 1))
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

    config = ServiceConfig(
        bind_addr=f"127.0.0.1:{args.port}",
        sadhan_ckpt=str(workdir / "sadhan.npz"),
        worthiness_ckpt=str(workdir / "worthiness.npz"),
        search_backend="fixture",
        fixture_dir=str(CORPUS),
        feedback_log=str(workdir / "feedback.jsonl"),
    )
    uvicorn.run(create_app(config), host="127.0.0.1", port=args.port,
                log_level="warning")


if __name__ == "__main__":
    main()
