"""SADHAN: the hierarchical aspect-guided credibility classifier.

Word-level and sentence-level Bi-LSTM encoders with additive attention
conditioned on the encoded claim and on latent-aspect embeddings (author,
topic, domain), a softmax head over {true, false}, a seeded training loop
with dropout on the encoder outputs, and attention-based evidence
extraction for display.

The forward pass runs once per (aspect kind, evidence document) pair;
sub-model probabilities are averaged over aspect kinds per document and
then over documents.  Backpropagation is hand-wired through the whole
hierarchy and checked against finite differences in the tests.
"""

from __future__ import annotations

import copy
import math
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from . import nn
from .nn import Array, TrainConfig
from .textproc import (
    ASPECT_KINDS,
    Claim,
    EmbeddingTable,
    embed,
    segment_sentences,
    tokenize,
)

LABELS = ("true", "false")
UNK_ASPECT = "<unk>"

# Reference metrics reported for the original full-scale SADHAN deployment
# (trained on the Snopes and PolitiFact corpora, which are not distributed
# with this package, so these numbers are not reproducible here).
REFERENCE_METRICS = {
    "politifact": {"true_acc": 68.37, "false_acc": 78.23, "macro_f1": 75.69, "auc": 77.43},
    "snopes": {"true_acc": 79.47, "false_acc": 84.26, "macro_f1": 80.09, "auc": 85.65},
}


class NoEvidenceError(Exception):
    """Raised when prediction is attempted with zero usable evidence."""


@dataclass
class SadhanDims:
    """Model dimensions.  Full-scale defaults; tests shrink them."""

    embed_dim: int = 100
    hidden: int = 200
    aspect_dim: int = 100
    att_dim: int = 0  # 0 means 2 * hidden

    def __post_init__(self):
        if self.att_dim == 0:
            self.att_dim = 2 * self.hidden


class AspectEmbeddingTable:
    """Jointly trained vectors for latent aspect values.

    One matrix per aspect kind; row 0 is the kind's UNK vector, used
    whenever a claim carries no value (or an unseen value) for the kind.
    """

    def __init__(self, dim: int, values: dict[str, list[str]],
                 matrices: dict[str, Array] | None = None,
                 rng: np.random.Generator | None = None):
        self.dim = dim
        self.value_rows: dict[str, dict[str, int]] = {}
        self.matrices: dict[str, Array] = {}
        for kind in ASPECT_KINDS:
            vals = list(values.get(kind, []))
            self.value_rows[kind] = {v: i + 1 for i, v in enumerate(vals)}
            if matrices is not None:
                m = np.asarray(matrices[kind], dtype=np.float64)
                if m.shape != (len(vals) + 1, dim):
                    raise ValueError(
                        f"aspect matrix for {kind!r} has shape {m.shape}, "
                        f"expected {(len(vals) + 1, dim)}"
                    )
            else:
                s = 1.0 / math.sqrt(dim)
                m = (rng or np.random.default_rng()).uniform(
                    -s, s, size=(len(vals) + 1, dim))
            self.matrices[kind] = m

    def row_index(self, kind: str, value: str | None) -> int:
        return self.value_rows[kind].get(value, 0) if value is not None else 0

    def vector(self, kind: str, value: str | None) -> Array:
        return self.matrices[kind][self.row_index(kind, value)]

    def values(self) -> dict[str, list[str]]:
        return {k: list(rows) for k, rows in self.value_rows.items()}


class SadhanParams:
    """Every trainable tensor of the model, shape-checked at construction."""

    def __init__(self, dims: SadhanDims, claim_lstm: nn.BiLSTMParams,
                 word_lstm: nn.BiLSTMParams, sent_lstm: nn.BiLSTMParams,
                 word_att: nn.AttentionParams, sent_att: nn.AttentionParams,
                 aspects: AspectEmbeddingTable, head_W: Array, head_b: Array):
        d, h, da, k = dims.embed_dim, dims.hidden, dims.aspect_dim, dims.att_dim
        expect = {
            "claim_lstm input": (claim_lstm.fwd.input_size, d),
            "claim_lstm hidden": (claim_lstm.hidden_size, h),
            "word_lstm input": (word_lstm.fwd.input_size, d),
            "word_lstm hidden": (word_lstm.hidden_size, h),
            "sent_lstm input": (sent_lstm.fwd.input_size, 2 * h),
            "sent_lstm hidden": (sent_lstm.hidden_size, h),
            "word_att.Wh": (word_att.Wh.shape, (k, 2 * h)),
            "word_att.Wc": (word_att.Wc.shape, (k, 2 * h)),
            "word_att.Wa": (word_att.Wa.shape, (k, da)),
            "sent_att.Wh": (sent_att.Wh.shape, (k, 2 * h)),
            "sent_att.Wc": (sent_att.Wc.shape, (k, 2 * h)),
            "sent_att.Wa": (sent_att.Wa.shape, (k, da)),
            "head_W": (head_W.shape, (2, 4 * h)),
            "head_b": (head_b.shape, (2,)),
            "aspect dim": (aspects.dim, da),
        }
        for name, (got, want) in expect.items():
            if got != want:
                raise ValueError(f"{name}: got {got}, expected {want}")
        self.dims = dims
        self.claim_lstm = claim_lstm
        self.word_lstm = word_lstm
        self.sent_lstm = sent_lstm
        self.word_att = word_att
        self.sent_att = sent_att
        self.aspects = aspects
        self.head_W = head_W
        self.head_b = head_b

    @classmethod
    def init(cls, dims: SadhanDims, aspect_values: dict[str, list[str]] | None = None,
             seed: int = 0) -> "SadhanParams":
        rng = np.random.default_rng(seed)
        d, h, da, k = dims.embed_dim, dims.hidden, dims.aspect_dim, dims.att_dim
        s = 1.0 / math.sqrt(4 * h)
        return cls(
            dims=dims,
            claim_lstm=nn.BiLSTMParams.create(d, h, rng),
            word_lstm=nn.BiLSTMParams.create(d, h, rng),
            sent_lstm=nn.BiLSTMParams.create(2 * h, h, rng),
            word_att=nn.AttentionParams.create(2 * h, 2 * h, da, k, rng),
            sent_att=nn.AttentionParams.create(2 * h, 2 * h, da, k, rng),
            aspects=AspectEmbeddingTable(da, aspect_values or {}, rng=rng),
            head_W=rng.uniform(-s, s, size=(2, 4 * h)),
            head_b=np.zeros(2),
        )

    def named_tensors(self) -> dict[str, Array]:
        """Live (uncopied) views of every trainable tensor, by stable name."""
        out: dict[str, Array] = {}
        out.update(nn.named_bilstm_tensors("claim_lstm", self.claim_lstm))
        out.update(nn.named_bilstm_tensors("word_lstm", self.word_lstm))
        out.update(nn.named_bilstm_tensors("sent_lstm", self.sent_lstm))
        out.update(nn.named_attention_tensors("word_att", self.word_att))
        out.update(nn.named_attention_tensors("sent_att", self.sent_att))
        for kind in ASPECT_KINDS:
            out[f"aspect.{kind}"] = self.aspects.matrices[kind]
        out["head.W"] = self.head_W
        out["head.b"] = self.head_b
        return out


@dataclass
class AttentionMap:
    """Word- and sentence-level attention over one evidence document.

    ``sentence_weights`` (beta) and each ``word_weights[i]`` (alpha_i) are
    softmax distributions.  ``intensities`` rescale the per-sentence
    salience beta_i * max_t alpha_{i,t} so the most salient sentence is
    exactly 1.  ``sentence_indices`` are positions in the original
    document (identity unless empty sentences were dropped upstream).
    """

    sentence_weights: Array
    word_weights: list[Array]
    sentence_indices: list[int]
    intensities: Array = field(default=None)  # type: ignore[assignment]

    def __post_init__(self):
        if self.intensities is None:
            raw = self.sentence_weights * np.array(
                [float(np.max(a)) for a in self.word_weights])
            self.intensities = raw / np.max(raw)


@dataclass
class CredibilityResult:
    """Aggregated verdict probabilities plus display payload."""

    prob_true: float
    prob_false: float
    attention_maps: list[AttentionMap]
    aspect_probabilities: dict[str, dict[str, float]] | None = None

    @property
    def score(self) -> float:
        """Credibility score: the probability the claim is true."""
        return self.prob_true


def encode_claim(claim: Claim, params: SadhanParams, table: EmbeddingTable) -> Array:
    """Mean of the claim-encoder Bi-LSTM states over all claim tokens."""
    vec, _ = _encode_claim_cached(claim, params, table)
    return vec


def _encode_claim_cached(claim, params, table):
    if not claim.tokens:
        raise ValueError("claim has no tokens")
    embs = embed(list(claim.tokens), table.vocab, table)
    states, cache = nn.bilstm_forward(embs, params.claim_lstm)
    return states.mean(axis=0), (states, cache)


def conditioned_attention(states: Array, claim_vec: Array, aspect_vec: Array,
                          att_params: nn.AttentionParams) -> tuple[Array, Array]:
    """Additive attention over states, conditioned on claim and aspect."""
    context, weights, _ = nn.attention_forward(states, claim_vec, aspect_vec, att_params)
    return context, weights


def _aspect_kinds_for(claim: Claim) -> list[str]:
    present = [k for k in ASPECT_KINDS if k in claim.aspects]
    return present or list(ASPECT_KINDS)


def _document_forward(sent_embs, claim_vec, aspect_vec, params,
                      keep_prob=1.0, rng=None):
    """One hierarchy pass over a document given the encoded claim.

    ``sent_embs`` is a list of (T_i, d) embedding matrices, one per
    non-empty sentence.  Returns (logits, probs, beta, alphas, cache).
    """
    word_runs = []
    sent_vecs = []
    alphas = []
    for embs in sent_embs:
        states, wcache = nn.bilstm_forward(embs, params.word_lstm)
        mask = nn.dropout_mask(states.shape, keep_prob, rng) if keep_prob < 1.0 else None
        dropped = states * mask if mask is not None else states
        ctx, alpha, acache = nn.attention_forward(
            dropped, claim_vec, aspect_vec, params.word_att)
        word_runs.append((wcache, mask, acache))
        sent_vecs.append(ctx)
        alphas.append(alpha)
    sent_matrix = np.stack(sent_vecs)
    sstates, scache = nn.bilstm_forward(sent_matrix, params.sent_lstm)
    smask = nn.dropout_mask(sstates.shape, keep_prob, rng) if keep_prob < 1.0 else None
    sdropped = sstates * smask if smask is not None else sstates
    doc_vec, beta, satt_cache = nn.attention_forward(
        sdropped, claim_vec, aspect_vec, params.sent_att)
    cat = np.concatenate([doc_vec, claim_vec])
    logits = nn.dense_forward(cat, params.head_W, params.head_b)
    probs = nn.softmax(logits)
    cache = (word_runs, scache, smask, satt_cache, cat)
    return logits, probs, beta, alphas, cache


def _document_backward(dlogits, cache, params, grads):
    """Backward for _document_forward.

    Accumulates parameter gradients into ``grads`` (shared-name dict,
    aspect gradient under the kind's full matrix) and returns
    (dclaim_vec, daspect_vec) for the caller to propagate.
    """
    word_runs, scache, smask, satt_cache, cat = cache
    h2 = 2 * params.dims.hidden
    dcat, dW, db = nn.dense_backward(dlogits, cat, params.head_W)
    nn.accumulate(grads, {"head.W": dW, "head.b": db})
    ddoc_vec = dcat[:h2]
    dclaim_vec = dcat[h2:].copy()

    dsdropped, dclaim_s, daspect, satt_grads = nn.attention_backward(
        ddoc_vec, satt_cache, params.sent_att)
    nn.accumulate(grads, satt_grads, prefix="sent_att.")
    dclaim_vec += dclaim_s
    dsstates = dsdropped * smask if smask is not None else dsdropped
    dsent_vecs, slstm_grads = nn.bilstm_backward(dsstates, scache, params.sent_lstm)
    nn.accumulate(grads, slstm_grads, prefix="sent_lstm.")

    for i, (wcache, mask, acache) in enumerate(word_runs):
        dwdropped, dclaim_w, daspect_w, watt_grads = nn.attention_backward(
            dsent_vecs[i], acache, params.word_att)
        nn.accumulate(grads, watt_grads, prefix="word_att.")
        dclaim_vec += dclaim_w
        daspect += daspect_w
        dwstates = dwdropped * mask if mask is not None else dwdropped
        _, wlstm_grads = nn.bilstm_backward(dwstates, wcache, params.word_lstm)
        nn.accumulate(grads, wlstm_grads, prefix="word_lstm.")
    return dclaim_vec, daspect


def _claim_backward(dclaim_vec, claim_cache, params, grads):
    states, cache = claim_cache
    dstates = np.tile(dclaim_vec / states.shape[0], (states.shape[0], 1))
    _, clstm_grads = nn.bilstm_backward(dstates, cache, params.claim_lstm)
    nn.accumulate(grads, clstm_grads, prefix="claim_lstm.")


def _prepare_sentences(doc_sentences):
    """Drop empty token lists, keeping original positions."""
    kept, indices = [], []
    for i, tokens in enumerate(doc_sentences):
        if tokens:
            kept.append(list(tokens))
            indices.append(i)
    return kept, indices


def classify_document(claim: Claim, doc_sentences: list[list[str]], aspect_kind: str,
                      params: SadhanParams, table: EmbeddingTable
                      ) -> tuple[Array, AttentionMap]:
    """Classify one evidence document under one aspect kind.

    Returns the (true, false) probability pair and the attention map.
    Raises ValueError when every sentence is empty.
    """
    if aspect_kind not in ASPECT_KINDS:
        raise ValueError(f"unknown aspect kind {aspect_kind!r}")
    kept, indices = _prepare_sentences(doc_sentences)
    if not kept:
        raise ValueError("document has no non-empty sentences")
    claim_vec, _ = _encode_claim_cached(claim, params, table)
    aspect_vec = params.aspects.vector(aspect_kind, claim.aspects.get(aspect_kind))
    sent_embs = [embed(toks, table.vocab, table) for toks in kept]
    _, probs, beta, alphas, _ = _document_forward(
        sent_embs, claim_vec, aspect_vec, params)
    attn = AttentionMap(sentence_weights=beta, word_weights=alphas,
                        sentence_indices=indices)
    return probs, attn


def predict(claim: Claim, evidence: list[list[list[str]]], params: SadhanParams,
            table: EmbeddingTable) -> CredibilityResult:
    """Aggregate credibility over every aspect kind and evidence document.

    Each document is classified once per aspect kind present on the claim
    (all three UNK-backed kinds when the claim carries none); per-document
    probabilities are the mean over kinds, the final probabilities the
    mean over documents.  Raises :class:`NoEvidenceError` when no document
    has a non-empty sentence; callers map that to an explicit
    "unverifiable" outcome rather than a fabricated score.
    """
    docs = []
    for doc in evidence:
        kept, indices = _prepare_sentences(doc)
        if kept:
            docs.append((kept, indices))
    if not docs:
        raise NoEvidenceError("no evidence document with a non-empty sentence")
    kinds = _aspect_kinds_for(claim)
    claim_vec, _ = _encode_claim_cached(claim, params, table)

    doc_probs = []
    attention_maps = []
    kind_probs = {k: [] for k in kinds}
    for kept, indices in docs:
        sent_embs = [embed(toks, table.vocab, table) for toks in kept]
        per_kind = []
        betas = []
        alpha_sets = []
        for kind in kinds:
            aspect_vec = params.aspects.vector(kind, claim.aspects.get(kind))
            _, probs, beta, alphas, _ = _document_forward(
                sent_embs, claim_vec, aspect_vec, params)
            per_kind.append(probs)
            betas.append(beta)
            alpha_sets.append(alphas)
            kind_probs[kind].append(probs)
        doc_probs.append(np.mean(per_kind, axis=0))
        # Display weights: average the attention distributions over kinds
        # (a mean of softmax distributions still sums to one).
        beta_avg = np.mean(betas, axis=0)
        alphas_avg = [np.mean([a[i] for a in alpha_sets], axis=0)
                      for i in range(len(kept))]
        attention_maps.append(AttentionMap(
            sentence_weights=beta_avg, word_weights=alphas_avg,
            sentence_indices=indices))

    final = np.mean(doc_probs, axis=0)
    aspect_probabilities = None
    if claim.aspects:
        aspect_probabilities = {
            kind: {"true": float(np.mean([p[0] for p in ps])),
                   "false": float(np.mean([p[1] for p in ps]))}
            for kind, ps in kind_probs.items()
        }
    return CredibilityResult(
        prob_true=float(final[0]), prob_false=float(final[1]),
        attention_maps=attention_maps,
        aspect_probabilities=aspect_probabilities,
    )


def extract_evidence(attn: AttentionMap, doc_sentences: list) -> list[tuple]:
    """Pair each attended sentence with its highlight intensity.

    Sentence salience is beta_i * max_t(alpha_{i,t}), rescaled so the
    maximum over the document is exactly 1.  Returns
    (sentence, intensity, word_weights) tuples in document order.
    """
    out = []
    for k, idx in enumerate(attn.sentence_indices):
        out.append((doc_sentences[idx], float(attn.intensities[k]),
                    attn.word_weights[k]))
    return out


# ---------------------------------------------------------------------------
# Training and evaluation
# ---------------------------------------------------------------------------

@dataclass
class SadhanExample:
    """One labeled training instance: a claim with its evidence documents."""

    claim: Claim
    documents: list[list[list[str]]]  # documents -> sentences -> tokens
    label: str

    def __post_init__(self):
        if self.label not in LABELS:
            raise ValueError(f"label must be one of {LABELS}, got {self.label!r}")


@dataclass
class SadhanTrainResult:
    params: SadhanParams
    loss_history: list[float]
    val_f1_history: list[float]


def mean_loss(params: SadhanParams, examples: list[SadhanExample],
              table: EmbeddingTable) -> float:
    """Forward-only counterpart of :func:`loss_and_gradients` (dropout off).

    Same summation order as the gradient path, so finite-difference checks
    see exactly the loss the analytic gradients differentiate.
    """
    n_sub = 0
    passes = []
    for ex in examples:
        kinds = _aspect_kinds_for(ex.claim)
        docs = [kept for doc in ex.documents
                if (kept := _prepare_sentences(doc)[0])]
        if not docs:
            raise NoEvidenceError("training example has no usable evidence")
        passes.append((ex, kinds, docs))
        n_sub += len(kinds) * len(docs)
    total = 0.0
    for ex, kinds, docs in passes:
        claim_vec, _ = _encode_claim_cached(ex.claim, params, table)
        target = LABELS.index(ex.label)
        for doc in docs:
            sent_embs = [embed(toks, table.vocab, table) for toks in doc]
            for kind in kinds:
                aspect_vec = params.aspects.vector(kind, ex.claim.aspects.get(kind))
                logits, _, _, _, _ = _document_forward(
                    sent_embs, claim_vec, aspect_vec, params)
                loss, _, _ = nn.softmax_cross_entropy(logits, target)
                total += loss / n_sub
    return total


def loss_and_gradients(params: SadhanParams, examples: list[SadhanExample],
                       table: EmbeddingTable, keep_prob: float = 1.0,
                       rng: np.random.Generator | None = None
                       ) -> tuple[float, dict[str, Array]]:
    """Mean cross-entropy over every (aspect kind, document) sub-prediction
    in ``examples``, with its full analytic gradient."""
    passes = []  # (example, kinds, docs)
    n_sub = 0
    for ex in examples:
        kinds = _aspect_kinds_for(ex.claim)
        docs = [kept for doc in ex.documents
                if (kept := _prepare_sentences(doc)[0])]
        if not docs:
            raise NoEvidenceError("training example has no usable evidence")
        passes.append((ex, kinds, docs))
        n_sub += len(kinds) * len(docs)

    grads: dict[str, Array] = {}
    total_loss = 0.0
    for ex, kinds, docs in passes:
        claim_vec, claim_cache = _encode_claim_cached(ex.claim, params, table)
        target = LABELS.index(ex.label)
        dclaim_total = np.zeros_like(claim_vec)
        for doc in docs:
            sent_embs = [embed(toks, table.vocab, table) for toks in doc]
            for kind in kinds:
                row = params.aspects.row_index(kind, ex.claim.aspects.get(kind))
                aspect_vec = params.aspects.matrices[kind][row]
                logits, _, _, _, cache = _document_forward(
                    sent_embs, claim_vec, aspect_vec, params,
                    keep_prob=keep_prob, rng=rng)
                loss, _, dlogits = nn.softmax_cross_entropy(logits, target)
                total_loss += loss / n_sub
                dclaim, daspect = _document_backward(
                    dlogits / n_sub, cache, params, grads)
                dclaim_total += dclaim
                aname = f"aspect.{kind}"
                if aname not in grads:
                    grads[aname] = np.zeros_like(params.aspects.matrices[kind])
                grads[aname][row] += daspect
        _claim_backward(dclaim_total, claim_cache, params, grads)
    return total_loss, grads


def train(dataset: list[SadhanExample], config: TrainConfig,
          params: SadhanParams, table: EmbeddingTable,
          val: list[SadhanExample] | None = None) -> SadhanTrainResult:
    """Seeded mini-batch training; returns the epoch with best macro-F1.

    Dropout (keep probability from ``config``) is applied to the Bi-LSTM
    outputs at both hierarchy levels during training only.  Validation
    defaults to the training set.
    """
    labels = {ex.label for ex in dataset}
    if len(labels) < 2:
        raise ValueError("training data must contain both labels")
    val = val if val is not None else dataset
    rng = np.random.default_rng(config.seed)
    optimizer = nn.make_optimizer(config)
    tensors = params.named_tensors()

    best_f1 = -1.0
    best = copy.deepcopy(params)
    loss_history: list[float] = []
    val_history: list[float] = []
    n = len(dataset)
    for _ in range(config.epochs):
        order = rng.permutation(n)
        epoch_losses = []
        for start in range(0, n, config.batch_size):
            batch = [dataset[i] for i in order[start : start + config.batch_size]]
            loss, grads = loss_and_gradients(
                params, batch, table, keep_prob=config.keep_prob, rng=rng)
            optimizer.step(tensors, grads)
            epoch_losses.append(loss)
        loss_history.append(float(np.mean(epoch_losses)))
        metrics = evaluate(params, val, table)
        val_history.append(metrics["macro_f1"])
        if metrics["macro_f1"] > best_f1:
            best_f1 = metrics["macro_f1"]
            best = copy.deepcopy(params)
    return SadhanTrainResult(params=best, loss_history=loss_history,
                             val_f1_history=val_history)


def evaluate(params: SadhanParams, dataset: list[SadhanExample],
             table: EmbeddingTable) -> dict[str, float]:
    """Per-class accuracy, macro-F1 and rank-statistic AUC of P(false)."""
    if not dataset:
        raise ValueError("cannot evaluate on an empty dataset")
    y_true = []
    y_pred = []
    p_false = []
    for ex in dataset:
        result = predict(ex.claim, ex.documents, params, table)
        y_true.append(ex.label)
        y_pred.append("true" if result.score >= 0.5 else "false")
        p_false.append(result.prob_false)

    def class_stats(label):
        tp = sum(1 for t, p in zip(y_true, y_pred) if t == label and p == label)
        fp = sum(1 for t, p in zip(y_true, y_pred) if t != label and p == label)
        fn = sum(1 for t, p in zip(y_true, y_pred) if t == label and p != label)
        support = sum(1 for t in y_true if t == label)
        acc = tp / support if support else float("nan")
        prec = tp / (tp + fp) if tp + fp else 0.0
        rec = tp / (tp + fn) if tp + fn else 0.0
        f1 = 2 * prec * rec / (prec + rec) if prec + rec else 0.0
        return acc, f1

    true_acc, f1_true = class_stats("true")
    false_acc, f1_false = class_stats("false")
    return {
        "true_acc": true_acc,
        "false_acc": false_acc,
        "macro_f1": (f1_true + f1_false) / 2.0,
        "auc": rank_auc(p_false, [t == "false" for t in y_true]),
    }


def rank_auc(scores: list[float], positives: list[bool]) -> float:
    """AUC via the midrank statistic (ties get averaged ranks)."""
    n_pos = sum(positives)
    n_neg = len(positives) - n_pos
    if n_pos == 0 or n_neg == 0:
        return float("nan")
    order = np.argsort(scores, kind="stable")
    ranks = np.empty(len(scores))
    sorted_scores = np.asarray(scores)[order]
    i = 0
    while i < len(scores):
        j = i
        while j + 1 < len(scores) and sorted_scores[j + 1] == sorted_scores[i]:
            j += 1
        ranks[order[i : j + 1]] = (i + j) / 2.0 + 1.0  # 1-based midrank
        i = j + 1
    rank_sum = float(sum(r for r, p in zip(ranks, positives) if p))
    return (rank_sum - n_pos * (n_pos + 1) / 2.0) / (n_pos * n_neg)


def cross_validate(dataset: list[SadhanExample], config: TrainConfig,
                   dims: SadhanDims, table: EmbeddingTable,
                   folds: int = 10) -> dict:
    """K-fold driver: trains a fresh model per fold, averages the metrics."""
    if len(dataset) < folds:
        raise ValueError(f"need at least {folds} examples for {folds}-fold CV")
    rng = np.random.default_rng(config.seed)
    order = rng.permutation(len(dataset))
    fold_metrics = []
    aspect_values = collect_aspect_values(dataset)
    for f in range(folds):
        test_idx = set(order[f::folds].tolist())
        train_set = [dataset[i] for i in range(len(dataset)) if i not in test_idx]
        test_set = [dataset[i] for i in sorted(test_idx)]
        params = SadhanParams.init(dims, aspect_values, seed=config.seed + f)
        result = train(train_set, config, params, table)
        fold_metrics.append(evaluate(result.params, test_set, table))
    mean = {k: float(np.mean([m[k] for m in fold_metrics])) for k in fold_metrics[0]}
    return {"folds": fold_metrics, "mean": mean}


def collect_aspect_values(dataset: list[SadhanExample]) -> dict[str, list[str]]:
    """Distinct aspect values per kind, in sorted order."""
    values: dict[str, set[str]] = {k: set() for k in ASPECT_KINDS}
    for ex in dataset:
        for kind, value in ex.claim.aspects.items():
            values[kind].add(value)
    return {k: sorted(v) for k, v in values.items()}


# ---------------------------------------------------------------------------
# On-disk training data layout (used by the CLI)
# ---------------------------------------------------------------------------

def load_training_dir(root: str | Path) -> list[SadhanExample]:
    """Read examples from ``root/<name>/{claim.txt,label,aspects,evidence/}``.

    ``label`` holds "true" or "false"; ``aspects`` (optional) holds
    ``key=value`` lines; each ``evidence/*.txt`` file is one document,
    sentence-segmented and tokenized on load.
    """
    root = Path(root)
    examples = []
    for ex_dir in sorted(p for p in root.iterdir() if p.is_dir()):
        claim_text = (ex_dir / "claim.txt").read_text(encoding="utf-8").strip()
        label = (ex_dir / "label").read_text(encoding="utf-8").strip().lower()
        aspects = {}
        aspects_file = ex_dir / "aspects"
        if aspects_file.exists():
            for line in aspects_file.read_text(encoding="utf-8").splitlines():
                line = line.strip()
                if line and "=" in line:
                    key, value = line.split("=", 1)
                    aspects[key.strip()] = value.strip()
        documents = []
        evidence_dir = ex_dir / "evidence"
        if evidence_dir.is_dir():
            for doc_file in sorted(evidence_dir.glob("*.txt")):
                text = doc_file.read_text(encoding="utf-8")
                sentences = segment_sentences(text)
                documents.append([tokenize(s.text) for s in sentences])
        examples.append(SadhanExample(
            claim=Claim(claim_text, aspects=aspects),
            documents=documents, label=label))
    return examples
