"""Claim check-worthiness scoring.

A single-layer unidirectional LSTM over token embeddings, mean-pooled and
fed to a dense softmax over {claim, non-claim}.  The softmax probability
of the "claim" class is the check-worthiness score used to rank the
sentences of an article.

The original deployment fine-tuned a pretrained language model for this
task; this package trains the classifier from scratch instead (no
pretrained language model is bundled) while keeping the scoring contract:
the score is the claim-class softmax probability.
"""

from __future__ import annotations

import copy
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from . import nn
from .nn import Array, TrainConfig
from .textproc import (
    EmbeddingTable,
    Sentence,
    build_vocabulary,
    content_tokens,
    embed,
)

LABELS = ("claim", "non-claim")

# Reference metrics reported for the original full-scale classifier,
# 5-fold cross-validated on the combined 9069-sentence debate/PolitiFact
# corpus.  That corpus is not distributed with this package, so these
# numbers are documentation, not a reproducible target.
REFERENCE_METRICS = {"precision": 0.913, "recall": 0.937, "micro_f1": 0.920}


@dataclass
class ScoredSentence:
    """A sentence and its claim-class softmax probability."""

    sentence: Sentence
    score: float


class WorthinessModel:
    """Embedding table + LSTM + dense output layer over two classes."""

    def __init__(self, table: EmbeddingTable, lstm: nn.LSTMParams,
                 W_out: Array, b_out: Array):
        h = lstm.hidden_size
        if lstm.input_size != table.dim:
            raise ValueError(
                f"LSTM input size {lstm.input_size} != embedding dim {table.dim}")
        if W_out.shape != (2, h):
            raise ValueError(f"W_out must be (2, {h}), got {W_out.shape}")
        if b_out.shape != (2,):
            raise ValueError(f"b_out must be (2,), got {b_out.shape}")
        self.table = table
        self.vocab = table.vocab
        self.lstm = lstm
        self.W_out = W_out
        self.b_out = b_out

    @property
    def hidden_size(self) -> int:
        return self.lstm.hidden_size

    @classmethod
    def init(cls, table: EmbeddingTable, hidden_size: int = 64,
             seed: int = 0) -> "WorthinessModel":
        rng = np.random.default_rng(seed)
        s = 1.0 / np.sqrt(hidden_size)
        return cls(
            table=table,
            lstm=nn.LSTMParams.create(table.dim, hidden_size, rng),
            W_out=rng.uniform(-s, s, size=(2, hidden_size)),
            b_out=np.zeros(2),
        )

    def named_tensors(self) -> dict[str, Array]:
        out = dict(nn.named_lstm_tensors("lstm", self.lstm))
        out["out.W"] = self.W_out
        out["out.b"] = self.b_out
        return out


def _forward(model: WorthinessModel, tokens: list[str]):
    """Logits for one tokenized sentence, with caches for backprop."""
    embs = embed(tokens, model.vocab, model.table)
    states, cache = nn.lstm_forward(embs, model.lstm)
    pooled = states.mean(axis=0)
    logits = nn.dense_forward(pooled, model.W_out, model.b_out)
    return logits, (states, cache, pooled)


def score_tokens(model: WorthinessModel, tokens: list[str]) -> float:
    """Claim-class probability for a token list; 0.0 when empty."""
    if not tokens:
        return 0.0
    logits, _ = _forward(model, tokens)
    return float(nn.softmax(logits)[0])


def score_sentence(model: WorthinessModel, sentence: Sentence) -> ScoredSentence:
    """Score one sentence for check-worthiness.

    Inference is deterministic (no dropout).  Sentences with no
    alphanumeric-bearing tokens score 0 by convention.
    """
    return ScoredSentence(sentence=sentence,
                          score=score_tokens(model, content_tokens(sentence.text)))


def rank_claims(model: WorthinessModel, article, threshold: float,
                top_k: int) -> list[ScoredSentence]:
    """Sentences scoring >= threshold, best first, truncated to top_k.

    Ties break by original sentence order.  ``article`` is anything with a
    ``sentences`` attribute (or a plain list of Sentence).
    """
    if not 0.0 <= threshold <= 1.0:
        raise ValueError("threshold must be in [0, 1]")
    if top_k < 1:
        raise ValueError("top_k must be >= 1")
    sentences = getattr(article, "sentences", article)
    scored = [score_sentence(model, s) for s in sentences]
    kept = [s for s in scored if s.score >= threshold]
    kept.sort(key=lambda s: (-s.score, s.sentence.index))
    return kept[:top_k]


# ---------------------------------------------------------------------------
# Training
# ---------------------------------------------------------------------------

@dataclass
class WorthinessTrainResult:
    model: WorthinessModel
    loss_history: list[float]
    val_f1_history: list[float]


def _loss_and_grads(model: WorthinessModel, batch: list[tuple[list[str], int]]):
    """Mean cross-entropy and gradients over (tokens, target) pairs."""
    grads: dict[str, Array] = {}
    total = 0.0
    n = len(batch)
    for tokens, target in batch:
        logits, (states, cache, pooled) = _forward(model, tokens)
        loss, _, dlogits = nn.softmax_cross_entropy(logits, target)
        total += loss / n
        dpooled, dW, db = nn.dense_backward(dlogits / n, pooled, model.W_out)
        nn.accumulate(grads, {"out.W": dW, "out.b": db})
        dstates = np.tile(dpooled / states.shape[0], (states.shape[0], 1))
        _, lstm_grads = nn.lstm_backward(dstates, cache, model.lstm)
        nn.accumulate(grads, lstm_grads, prefix="lstm.")
    return total, grads


def train_worthiness(dataset: list[tuple[str, str]], config: TrainConfig,
                     hidden_size: int = 64, embed_dim: int = 100,
                     table: EmbeddingTable | None = None,
                     val: list[tuple[str, str]] | None = None
                     ) -> WorthinessTrainResult:
    """Train from (sentence text, label) pairs, labels in {claim, non-claim}.

    Fully seeded: the vocabulary comes from the training sentences, the
    embedding table is either the one provided or a seeded random init,
    and shuffling is driven by ``config.seed``.  Returns the parameters
    from the epoch with the best validation micro-F1 (validation defaults
    to the training set).
    """
    if not dataset:
        raise ValueError("training data is empty")
    for _, label in dataset:
        if label not in LABELS:
            raise ValueError(f"label must be one of {LABELS}, got {label!r}")
    if len({label for _, label in dataset}) < 2:
        raise ValueError("training data must contain both labels")

    tokenized = [(content_tokens(text), LABELS.index(label))
                 for text, label in dataset]
    if table is None:
        vocab = build_vocabulary([toks for toks, _ in tokenized], min_count=1)
        table = EmbeddingTable.random(vocab, embed_dim, seed=config.seed)
    model = WorthinessModel.init(table, hidden_size=hidden_size, seed=config.seed)

    val_pairs = ([(content_tokens(t), LABELS.index(l)) for t, l in val]
                 if val is not None else tokenized)
    rng = np.random.default_rng(config.seed)
    optimizer = nn.make_optimizer(config)
    tensors = model.named_tensors()

    best_f1 = -1.0
    best = copy.deepcopy(model)
    loss_history: list[float] = []
    val_history: list[float] = []
    n = len(tokenized)
    for _ in range(config.epochs):
        order = rng.permutation(n)
        epoch_losses = []
        for start in range(0, n, config.batch_size):
            batch = [tokenized[i] for i in order[start : start + config.batch_size]]
            loss, grads = _loss_and_grads(model, batch)
            optimizer.step(tensors, grads)
            epoch_losses.append(loss)
        loss_history.append(float(np.mean(epoch_losses)))
        f1 = _micro_f1(model, val_pairs)
        val_history.append(f1)
        if f1 > best_f1:
            best_f1 = f1
            best = copy.deepcopy(model)
    return WorthinessTrainResult(model=best, loss_history=loss_history,
                                 val_f1_history=val_history)


def _predict_label(model: WorthinessModel, tokens: list[str]) -> int:
    return 0 if score_tokens(model, tokens) >= 0.5 else 1


def _micro_f1(model: WorthinessModel, pairs: list[tuple[list[str], int]]) -> float:
    correct = sum(1 for toks, target in pairs
                  if _predict_label(model, toks) == target)
    return correct / len(pairs)


def evaluate_worthiness(model: WorthinessModel,
                        dataset: list[tuple[str, str]]) -> dict[str, float]:
    """Precision/recall for the claim class plus micro-F1 over both classes.

    With two exhaustive single-label classes the micro-averaged F1 equals
    overall accuracy; it is computed from the aggregate counts anyway.
    """
    if not dataset:
        raise ValueError("cannot evaluate on an empty dataset")
    tp = fp = fn = correct = 0
    for text, label in dataset:
        if label not in LABELS:
            raise ValueError(f"label must be one of {LABELS}, got {label!r}")
        target = LABELS.index(label)
        pred = _predict_label(model, content_tokens(text))
        if pred == target:
            correct += 1
        if pred == 0 and target == 0:
            tp += 1
        elif pred == 0 and target == 1:
            fp += 1
        elif pred == 1 and target == 0:
            fn += 1
    precision = tp / (tp + fp) if tp + fp else 0.0
    recall = tp / (tp + fn) if tp + fn else 0.0
    return {"precision": precision, "recall": recall,
            "micro_f1": correct / len(dataset)}


def cross_validate_worthiness(dataset: list[tuple[str, str]], config: TrainConfig,
                              k: int = 5, **train_kwargs) -> dict:
    """Seeded k-fold driver: trains per fold, reports per-fold and mean."""
    if len(dataset) < k:
        raise ValueError(f"need at least {k} examples for {k}-fold CV")
    rng = np.random.default_rng(config.seed)
    order = rng.permutation(len(dataset))
    fold_metrics = []
    for f in range(k):
        test_idx = set(order[f::k].tolist())
        train_set = [dataset[i] for i in range(len(dataset)) if i not in test_idx]
        test_set = [dataset[i] for i in sorted(test_idx)]
        result = train_worthiness(train_set, config, **train_kwargs)
        fold_metrics.append(evaluate_worthiness(result.model, test_set))
    mean = {key: float(np.mean([m[key] for m in fold_metrics]))
            for key in fold_metrics[0]}
    return {"folds": fold_metrics, "mean": mean}


# ---------------------------------------------------------------------------
# Dataset plumbing
# ---------------------------------------------------------------------------

def read_worthiness_tsv(path: str | Path) -> list[tuple[str, str]]:
    """Read sentence<TAB>label lines; label must be claim or non-claim."""
    dataset = []
    for lineno, line in enumerate(
            Path(path).read_text(encoding="utf-8").splitlines(), start=1):
        if not line.strip():
            continue
        parts = line.split("\t")
        if len(parts) != 2:
            raise ValueError(f"{path}: line {lineno}: expected sentence<TAB>label")
        text, label = parts
        if label not in LABELS:
            raise ValueError(f"{path}: line {lineno}: bad label {label!r}")
        dataset.append((text, label))
    return dataset


def write_worthiness_tsv(path: str | Path, dataset: list[tuple[str, str]]) -> None:
    lines = [f"{text}\t{label}" for text, label in dataset]
    Path(path).write_text("\n".join(lines) + "\n", encoding="utf-8")


_CLAIM_TEMPLATES = [
    "the unemployment rate rose to {n} percent last year",
    "the new vaccine reduced infections by {n} percent in trials",
    "the city budget allocated {n} million dollars to schools",
    "crime dropped {n} percent after the reform passed",
    "the company laid off {n} thousand workers in march",
    "exports grew by {n} percent according to the census figures",
    "the senator voted against the bill {n} times",
    "average temperatures increased {n} degrees over the decade",
]

_NONCLAIM_TEMPLATES = [
    "what a wonderful morning to walk along the river",
    "please remember to bring your umbrella tomorrow",
    "i really enjoy reading novels on quiet weekend afternoons",
    "could you pass the salt when you get a chance",
    "let us all take a deep breath and relax together",
    "my favorite color has always been a soft shade of green",
    "imagine spending the whole summer by the lakeside",
    "hopefully the weather stays pleasant for the picnic",
]


def generate_synthetic_corpus(n: int = 200, seed: int = 0) -> list[tuple[str, str]]:
    """A balanced, linearly separable synthetic corpus for tests.

    Claim sentences follow numeric/assertive templates; non-claims are
    questions, wishes and small talk with disjoint content vocabulary.
    """
    rng = np.random.default_rng(seed)
    dataset = []
    for i in range(n):
        if i % 2 == 0:
            template = _CLAIM_TEMPLATES[int(rng.integers(len(_CLAIM_TEMPLATES)))]
            dataset.append((template.format(n=int(rng.integers(2, 90))), "claim"))
        else:
            template = _NONCLAIM_TEMPLATES[int(rng.integers(len(_NONCLAIM_TEMPLATES)))]
            dataset.append((template, "non-claim"))
    return dataset
