"""Versioned checkpoint files shared by both trainable models.

A checkpoint is an .npz archive holding every parameter tensor bit-exactly
plus a JSON metadata record: format version, model kind, all dimension
hyperparameters, the vocabulary in id order, the embedding matrix (so a
checkpoint is a self-contained inference artifact) and a content
fingerprint used as the model identifier in service responses.
"""

from __future__ import annotations

import hashlib
import json
from pathlib import Path

import numpy as np

from . import nn
from .sadhan import AspectEmbeddingTable, SadhanDims, SadhanParams
from .textproc import ASPECT_KINDS, EmbeddingTable, Vocabulary
from .worthiness import WorthinessModel

FORMAT_VERSION = 1
_TENSOR_PREFIX = "tensor::"


class CheckpointError(Exception):
    """Unreadable, truncated, version-mismatched or dimension-mismatched file."""


def tensor_fingerprint(tensors: dict[str, np.ndarray]) -> str:
    """Order-independent content hash of named tensors (12 hex chars)."""
    digest = hashlib.sha256()
    for name in sorted(tensors):
        digest.update(name.encode("utf-8"))
        digest.update(np.ascontiguousarray(tensors[name]).tobytes())
    return digest.hexdigest()[:12]


def _write(path, kind: str, meta: dict, tensors: dict[str, np.ndarray]) -> str:
    model_id = tensor_fingerprint(tensors)
    full_meta = {"format_version": FORMAT_VERSION, "kind": kind,
                 "model_id": model_id, **meta}
    arrays = {_TENSOR_PREFIX + k: np.ascontiguousarray(v)
              for k, v in tensors.items()}
    arrays["__meta__"] = np.frombuffer(
        json.dumps(full_meta).encode("utf-8"), dtype=np.uint8).copy()
    with open(path, "wb") as fh:
        np.savez(fh, **arrays)
    return model_id


def _read(path, expected_kind: str) -> tuple[dict, dict[str, np.ndarray]]:
    path = Path(path)
    if not path.exists():
        raise CheckpointError(f"checkpoint not found: {path}")
    try:
        with np.load(path, allow_pickle=False) as data:
            files = list(data.files)
            if "__meta__" not in files:
                raise CheckpointError("checkpoint is missing field '__meta__'")
            meta = json.loads(bytes(data["__meta__"].tobytes()).decode("utf-8"))
            tensors = {
                name[len(_TENSOR_PREFIX):]: data[name]
                for name in files if name.startswith(_TENSOR_PREFIX)
            }
    except CheckpointError:
        raise
    except Exception as exc:  # zip/parse errors from truncated or corrupt files
        raise CheckpointError(f"corrupt checkpoint {path}: {exc}") from exc

    version = meta.get("format_version")
    if version != FORMAT_VERSION:
        raise CheckpointError(
            f"format_version mismatch: file has {version!r}, expected {FORMAT_VERSION}")
    kind = meta.get("kind")
    if kind != expected_kind:
        raise CheckpointError(f"kind mismatch: file has {kind!r}, expected {expected_kind!r}")
    return meta, tensors


def _require(tensors: dict[str, np.ndarray], name: str) -> np.ndarray:
    if name not in tensors:
        raise CheckpointError(f"checkpoint is missing tensor {name!r}")
    return np.asarray(tensors[name], dtype=np.float64)


def _check_shape(name: str, arr: np.ndarray, want: tuple) -> np.ndarray:
    if arr.shape != want:
        raise CheckpointError(
            f"tensor {name!r} has shape {arr.shape}, expected {want} "
            "for the dimensions recorded in the checkpoint")
    return arr


# ---------------------------------------------------------------------------
# SADHAN checkpoints
# ---------------------------------------------------------------------------

def save_sadhan(path, params: SadhanParams, table: EmbeddingTable) -> str:
    """Write a SADHAN checkpoint; returns the model id."""
    dims = params.dims
    meta = {
        "dims": {"embed_dim": dims.embed_dim, "hidden": dims.hidden,
                 "aspect_dim": dims.aspect_dim, "att_dim": dims.att_dim},
        "aspect_values": params.aspects.values(),
        "vocab": table.vocab.tokens,
    }
    tensors = dict(params.named_tensors())
    tensors["embeddings"] = table.matrix
    return _write(path, "sadhan", meta, tensors)


def load_sadhan(path) -> tuple[SadhanParams, EmbeddingTable, str]:
    """Read a SADHAN checkpoint back bit-exactly.

    Returns (params, embedding table, model id).  Raises
    :class:`CheckpointError` naming the offending field on any mismatch.
    """
    meta, tensors = _read(path, "sadhan")
    try:
        dims = SadhanDims(**meta["dims"])
        aspect_values = meta["aspect_values"]
        vocab_tokens = meta["vocab"]
    except (KeyError, TypeError) as exc:
        raise CheckpointError(f"checkpoint metadata is missing field: {exc}") from exc

    d, h, da, k = dims.embed_dim, dims.hidden, dims.aspect_dim, dims.att_dim

    def lstm(prefix: str, d_in: int) -> nn.LSTMParams:
        return nn.LSTMParams(
            Wx=_check_shape(f"{prefix}.Wx", _require(tensors, f"{prefix}.Wx"), (d_in, 4 * h)),
            Wh=_check_shape(f"{prefix}.Wh", _require(tensors, f"{prefix}.Wh"), (h, 4 * h)),
            b=_check_shape(f"{prefix}.b", _require(tensors, f"{prefix}.b"), (4 * h,)),
        )

    def bilstm(prefix: str, d_in: int) -> nn.BiLSTMParams:
        return nn.BiLSTMParams(fwd=lstm(f"{prefix}.fwd", d_in),
                               bwd=lstm(f"{prefix}.bwd", d_in))

    def attention(prefix: str) -> nn.AttentionParams:
        return nn.AttentionParams(
            Wh=_check_shape(f"{prefix}.Wh", _require(tensors, f"{prefix}.Wh"), (k, 2 * h)),
            Wc=_check_shape(f"{prefix}.Wc", _require(tensors, f"{prefix}.Wc"), (k, 2 * h)),
            Wa=_check_shape(f"{prefix}.Wa", _require(tensors, f"{prefix}.Wa"), (k, da)),
            b=_check_shape(f"{prefix}.b", _require(tensors, f"{prefix}.b"), (k,)),
            v=_check_shape(f"{prefix}.v", _require(tensors, f"{prefix}.v"), (k,)),
        )

    matrices = {
        kind: _check_shape(f"aspect.{kind}", _require(tensors, f"aspect.{kind}"),
                           (len(aspect_values.get(kind, [])) + 1, da))
        for kind in ASPECT_KINDS
    }
    try:
        params = SadhanParams(
            dims=dims,
            claim_lstm=bilstm("claim_lstm", d),
            word_lstm=bilstm("word_lstm", d),
            sent_lstm=bilstm("sent_lstm", 2 * h),
            word_att=attention("word_att"),
            sent_att=attention("sent_att"),
            aspects=AspectEmbeddingTable(da, aspect_values, matrices=matrices),
            head_W=_check_shape("head.W", _require(tensors, "head.W"), (2, 4 * h)),
            head_b=_check_shape("head.b", _require(tensors, "head.b"), (2,)),
        )
    except ValueError as exc:
        raise CheckpointError(f"inconsistent checkpoint dimensions: {exc}") from exc

    vocab = Vocabulary.from_tokens(vocab_tokens)
    emb = _require(tensors, "embeddings")
    if emb.shape != (len(vocab), d):
        raise CheckpointError(
            f"tensor 'embeddings' has shape {emb.shape}, expected {(len(vocab), d)}")
    table = EmbeddingTable(vocab, emb)
    return params, table, meta["model_id"]


# ---------------------------------------------------------------------------
# Worthiness checkpoints
# ---------------------------------------------------------------------------

def save_worthiness(path, model: WorthinessModel) -> str:
    meta = {
        "dims": {"embed_dim": model.table.dim, "hidden": model.hidden_size},
        "vocab": model.vocab.tokens,
    }
    tensors = dict(model.named_tensors())
    tensors["embeddings"] = model.table.matrix
    return _write(path, "worthiness", meta, tensors)


def load_worthiness(path) -> tuple[WorthinessModel, str]:
    meta, tensors = _read(path, "worthiness")
    try:
        d = meta["dims"]["embed_dim"]
        h = meta["dims"]["hidden"]
        vocab_tokens = meta["vocab"]
    except (KeyError, TypeError) as exc:
        raise CheckpointError(f"checkpoint metadata is missing field: {exc}") from exc
    vocab = Vocabulary.from_tokens(vocab_tokens)
    emb = _require(tensors, "embeddings")
    if emb.shape != (len(vocab), d):
        raise CheckpointError(
            f"tensor 'embeddings' has shape {emb.shape}, expected {(len(vocab), d)}")
    try:
        model = WorthinessModel(
            table=EmbeddingTable(vocab, emb),
            lstm=nn.LSTMParams(
                Wx=_check_shape("lstm.Wx", _require(tensors, "lstm.Wx"), (d, 4 * h)),
                Wh=_check_shape("lstm.Wh", _require(tensors, "lstm.Wh"), (h, 4 * h)),
                b=_check_shape("lstm.b", _require(tensors, "lstm.b"), (4 * h,)),
            ),
            W_out=_check_shape("out.W", _require(tensors, "out.W"), (2, h)),
            b_out=_check_shape("out.b", _require(tensors, "out.b"), (2,)),
        )
    except ValueError as exc:
        raise CheckpointError(f"inconsistent checkpoint dimensions: {exc}") from exc
    return model, meta["model_id"]
