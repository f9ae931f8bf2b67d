"""Shared fixtures: corpora, tables, toy datasets and service checkpoints."""

from __future__ import annotations

from pathlib import Path

import numpy as np
import pytest

from brenda import checkpoint as ckpt
from brenda import sadhan, worthiness
from brenda.nn import TrainConfig
from brenda.retrieval import SearchResult, extract_article
from brenda.textproc import Claim, EmbeddingTable, build_vocabulary, tokenize

FIXTURES = Path(__file__).parent / "fixtures"

# Claims the service tests exercise against the fixture corpus.
VERBATIM_CLAIM = "Covid-19 can be cured by drinking bleach."
NO_OVERLAP_CLAIM = "zorblax quantum yodeling festival"


@pytest.fixture(scope="session")
def fixtures_dir() -> Path:
    return FIXTURES


@pytest.fixture(scope="session")
def corpus_dir() -> Path:
    return FIXTURES / "corpus"


@pytest.fixture(scope="session")
def corpus_articles(corpus_dir):
    """Every fixture page, extracted."""
    articles = []
    for path in sorted(corpus_dir.glob("*.html")):
        result = SearchResult(url=f"fixture://{path.name}", title=path.stem,
                              raw_html=path.read_text(encoding="utf-8"), rank=1)
        articles.append(extract_article(result))
    return articles


@pytest.fixture(scope="session")
def corpus_table(corpus_articles):
    """Small random embedding table covering the fixture corpus tokens."""
    corpus = [tokenize(s.text) for a in corpus_articles for s in a.sentences]
    corpus.append(tokenize(VERBATIM_CLAIM))
    vocab = build_vocabulary(corpus, min_count=1)
    return EmbeddingTable.random(vocab, 16, seed=11)


def make_toy_sadhan_dataset(seed: int = 5) -> list[sadhan.SadhanExample]:
    """Eight claims whose evidence vocabulary separates true from false."""
    true_words = ["confirmed", "verified", "accurate", "official", "records", "show"]
    false_words = ["hoax", "debunked", "fabricated", "myth", "retracted", "wrong"]
    claims = [
        ("the vaccine reduces severe illness", "true", {"topic": "health"}),
        ("the bridge opened last spring", "true", {"topic": "city"}),
        ("exports grew eight percent", "true", {"author": "ann"}),
        ("the reservoir reached capacity", "true", {}),
        ("covid-19 can be cured by bleach", "false", {"topic": "health"}),
        ("the moon landing was staged", "false", {"topic": "space"}),
        ("the senator owns a gold mine", "false", {"author": "bob"}),
        ("drinking seawater cures thirst", "false", {}),
    ]
    rng = np.random.default_rng(seed)
    examples = []
    for text, label, aspects in claims:
        pool = true_words if label == "true" else false_words
        doc = [[*rng.choice(pool, size=3).tolist(), "the", "report"]
               for _ in range(2)]
        examples.append(sadhan.SadhanExample(
            claim=Claim(text, aspects=aspects), documents=[doc], label=label))
    return examples


def toy_table_for(examples: list[sadhan.SadhanExample],
                  dim: int = 16, seed: int = 6) -> EmbeddingTable:
    corpus = [list(ex.claim.tokens) for ex in examples]
    corpus += [toks for ex in examples for doc in ex.documents for toks in doc]
    vocab = build_vocabulary(corpus, min_count=1)
    return EmbeddingTable.random(vocab, dim, seed=seed)


@pytest.fixture(scope="session")
def toy_sadhan_dataset():
    return make_toy_sadhan_dataset()


@pytest.fixture(scope="session")
def toy_sadhan_table(toy_sadhan_dataset):
    return toy_table_for(toy_sadhan_dataset)


DESK_DIMS = dict(embed_dim=16, hidden=8, aspect_dim=8, att_dim=16)


@pytest.fixture(scope="session")
def desk_dims():
    return sadhan.SadhanDims(**DESK_DIMS)


@pytest.fixture(scope="session")
def trained_worthiness():
    """Worthiness model overfit on the synthetic separable corpus."""
    dataset = worthiness.generate_synthetic_corpus(60, seed=13)
    config = TrainConfig(learning_rate=0.005, keep_prob=1.0, epochs=120,
                         batch_size=20, seed=13, optimizer="adam")
    return worthiness.train_worthiness(dataset, config,
                                       hidden_size=16, embed_dim=16).model


@pytest.fixture(scope="session")
def service_checkpoints(tmp_path_factory, corpus_table, trained_worthiness, desk_dims):
    """Saved model files the service tests point their config at."""
    root = tmp_path_factory.mktemp("checkpoints")
    params = sadhan.SadhanParams.init(desk_dims, {"topic": ["health"]}, seed=21)
    sadhan_path = root / "sadhan.npz"
    worthiness_path = root / "worthiness.npz"
    ckpt.save_sadhan(sadhan_path, params, corpus_table)
    ckpt.save_worthiness(worthiness_path, trained_worthiness)
    return {"sadhan": sadhan_path, "worthiness": worthiness_path}
