"""Neural network primitives built directly on numpy.

LSTM cells and sequences, bidirectional encoders, claim/aspect-conditioned
additive attention, a dense softmax head, dropout and the two optimizers.
Every forward function has a hand-derived backward counterpart; the pairing
is verified against central finite differences by the test suite, so keep
forward and backward in sync when touching anything here.

All tensors are float64.  Shapes follow the convention (time, features);
nothing here batches across examples, the training loops accumulate
gradients example by example.
"""

from __future__ import annotations

import copy
import math
from dataclasses import dataclass, fields

import numpy as np

Array = np.ndarray


def sigmoid(x: Array) -> Array:
    # Split by sign to avoid overflow in exp for large |x|.
    out = np.empty_like(x, dtype=np.float64)
    pos = x >= 0
    out[pos] = 1.0 / (1.0 + np.exp(-x[pos]))
    ex = np.exp(x[~pos])
    out[~pos] = ex / (1.0 + ex)
    return out


def softmax(x: Array) -> Array:
    """Numerically stable softmax over the last axis."""
    z = x - np.max(x, axis=-1, keepdims=True)
    e = np.exp(z)
    return e / e.sum(axis=-1, keepdims=True)


def softmax_cross_entropy(logits: Array, target: int) -> tuple[float, Array, Array]:
    """Softmax cross-entropy with logits.

    Returns (loss, probabilities, dloss/dlogits).
    """
    probs = softmax(logits)
    loss = -math.log(max(probs[target], 1e-300))
    dlogits = probs.copy()
    dlogits[target] -= 1.0
    return loss, probs, dlogits


# ---------------------------------------------------------------------------
# LSTM
# ---------------------------------------------------------------------------

@dataclass
class LSTMParams:
    """Single-direction LSTM weights; gate order i, f, g, o.

    Wx: (d_in, 4h)   Wh: (h, 4h)   b: (4h,)
    """

    Wx: Array
    Wh: Array
    b: Array

    def __post_init__(self):
        h = self.Wh.shape[0]
        if self.Wh.shape != (h, 4 * h):
            raise ValueError(f"Wh must be (h, 4h), got {self.Wh.shape}")
        if self.Wx.shape[1] != 4 * h:
            raise ValueError(f"Wx must be (d_in, 4h), got {self.Wx.shape}")
        if self.b.shape != (4 * h,):
            raise ValueError(f"b must be (4h,), got {self.b.shape}")

    @property
    def hidden_size(self) -> int:
        return self.Wh.shape[0]

    @property
    def input_size(self) -> int:
        return self.Wx.shape[0]

    @classmethod
    def create(cls, d_in: int, h: int, rng: np.random.Generator) -> "LSTMParams":
        s = 1.0 / math.sqrt(h)
        return cls(
            Wx=rng.uniform(-s, s, size=(d_in, 4 * h)),
            Wh=rng.uniform(-s, s, size=(h, 4 * h)),
            b=rng.uniform(-s, s, size=(4 * h,)),
        )


def lstm_cell_forward(x_t: Array, h_prev: Array, c_prev: Array,
                      params: LSTMParams) -> tuple[Array, Array]:
    """One gated LSTM step: returns (h_t, c_t)."""
    h_t, c_t, _ = _lstm_step(x_t, h_prev, c_prev, params)
    return h_t, c_t


def _lstm_step(x_t, h_prev, c_prev, p: LSTMParams):
    h = p.hidden_size
    if x_t.shape != (p.input_size,):
        raise ValueError(f"input has shape {x_t.shape}, expected ({p.input_size},)")
    if h_prev.shape != (h,) or c_prev.shape != (h,):
        raise ValueError("state dimensions do not match parameters")
    z = x_t @ p.Wx + h_prev @ p.Wh + p.b
    i = sigmoid(z[:h])
    f = sigmoid(z[h : 2 * h])
    g = np.tanh(z[2 * h : 3 * h])
    o = sigmoid(z[3 * h :])
    c_t = f * c_prev + i * g
    tanh_c = np.tanh(c_t)
    h_t = o * tanh_c
    return h_t, c_t, (x_t, h_prev, c_prev, i, f, g, o, c_t, tanh_c)


def lstm_forward(xs: Array, params: LSTMParams) -> tuple[Array, list]:
    """Run the cell over a (T, d_in) sequence from zero initial state.

    Returns the (T, h) hidden states and the cache for lstm_backward.
    """
    T = xs.shape[0]
    h = params.hidden_size
    hs = np.zeros((T, h))
    h_t = np.zeros(h)
    c_t = np.zeros(h)
    caches = []
    for t in range(T):
        h_t, c_t, cache = _lstm_step(xs[t], h_t, c_t, params)
        hs[t] = h_t
        caches.append(cache)
    return hs, caches


def lstm_backward(dhs: Array, caches: list,
                  params: LSTMParams) -> tuple[Array, dict[str, Array]]:
    """Backprop through time for lstm_forward.

    ``dhs`` is dloss/dstates, shape (T, h).  Returns (dxs, grads) with
    grads keyed 'Wx', 'Wh', 'b'.
    """
    T = len(caches)
    h = params.hidden_size
    dxs = np.zeros((T, params.input_size))
    dWx = np.zeros_like(params.Wx)
    dWh = np.zeros_like(params.Wh)
    db = np.zeros_like(params.b)
    dh_next = np.zeros(h)
    dc_next = np.zeros(h)
    for t in range(T - 1, -1, -1):
        x_t, h_prev, c_prev, i, f, g, o, c_t, tanh_c = caches[t]
        dh = dhs[t] + dh_next
        do = dh * tanh_c
        dc = dc_next + dh * o * (1.0 - tanh_c * tanh_c)
        df = dc * c_prev
        di = dc * g
        dg = dc * i
        dc_next = dc * f
        dz = np.concatenate([
            di * i * (1.0 - i),
            df * f * (1.0 - f),
            dg * (1.0 - g * g),
            do * o * (1.0 - o),
        ])
        dWx += np.outer(x_t, dz)
        dWh += np.outer(h_prev, dz)
        db += dz
        dxs[t] = params.Wx @ dz
        dh_next = params.Wh @ dz
    return dxs, {"Wx": dWx, "Wh": dWh, "b": db}


# ---------------------------------------------------------------------------
# Bidirectional encoder
# ---------------------------------------------------------------------------

@dataclass
class BiLSTMParams:
    """Forward and backward cells of a bidirectional encoder."""

    fwd: LSTMParams
    bwd: LSTMParams

    def __post_init__(self):
        if self.fwd.hidden_size != self.bwd.hidden_size:
            raise ValueError("forward/backward hidden sizes differ")
        if self.fwd.input_size != self.bwd.input_size:
            raise ValueError("forward/backward input sizes differ")

    @property
    def hidden_size(self) -> int:
        return self.fwd.hidden_size

    @property
    def output_size(self) -> int:
        return 2 * self.fwd.hidden_size

    @classmethod
    def create(cls, d_in: int, h: int, rng: np.random.Generator) -> "BiLSTMParams":
        return cls(fwd=LSTMParams.create(d_in, h, rng),
                   bwd=LSTMParams.create(d_in, h, rng))


def bilstm_forward(xs: Array, params: BiLSTMParams) -> tuple[Array, tuple]:
    """Encode a (T, d_in) sequence to (T, 2h) states plus backward cache.

    Row t concatenates the forward state at t with the backward state at t
    (the backward pass scans the reversed sequence).
    """
    if xs.shape[0] == 0:
        raise ValueError("cannot encode an empty sequence")
    hs_f, cache_f = lstm_forward(xs, params.fwd)
    hs_r, cache_r = lstm_forward(xs[::-1], params.bwd)
    states = np.concatenate([hs_f, hs_r[::-1]], axis=1)
    return states, (cache_f, cache_r)


def bilstm_backward(dstates: Array, cache: tuple,
                    params: BiLSTMParams) -> tuple[Array, dict[str, Array]]:
    """Backward for bilstm_forward; grads keyed 'fwd.Wx', ..., 'bwd.b'."""
    cache_f, cache_r = cache
    h = params.hidden_size
    dxs_f, grads_f = lstm_backward(dstates[:, :h], cache_f, params.fwd)
    # Backward-direction states were produced on the reversed sequence.
    dxs_r, grads_r = lstm_backward(dstates[::-1, h:], cache_r, params.bwd)
    dxs = dxs_f + dxs_r[::-1]
    grads = {f"fwd.{k}": v for k, v in grads_f.items()}
    grads.update({f"bwd.{k}": v for k, v in grads_r.items()})
    return dxs, grads


def bilstm_encode(sequence: Array, params: BiLSTMParams) -> Array:
    """Forward-only bidirectional encoding of a (T, d_in) sequence."""
    states, _ = bilstm_forward(np.asarray(sequence, dtype=np.float64), params)
    return states


# ---------------------------------------------------------------------------
# Claim/aspect-conditioned additive attention
# ---------------------------------------------------------------------------

@dataclass
class AttentionParams:
    """Additive attention scored by v' tanh(Wh s + Wc claim + Wa aspect + b).

    Wh: (k, m)   Wc: (k, d_claim)   Wa: (k, d_aspect)   b: (k,)   v: (k,)
    """

    Wh: Array
    Wc: Array
    Wa: Array
    b: Array
    v: Array

    def __post_init__(self):
        k = self.v.shape[0]
        for name in ("Wh", "Wc", "Wa"):
            m = getattr(self, name)
            if m.ndim != 2 or m.shape[0] != k:
                raise ValueError(f"{name} must have {k} rows, got {m.shape}")
        if self.b.shape != (k,):
            raise ValueError(f"b must be ({k},), got {self.b.shape}")

    @classmethod
    def create(cls, m: int, d_claim: int, d_aspect: int, k: int,
               rng: np.random.Generator) -> "AttentionParams":
        s = 1.0 / math.sqrt(k)
        return cls(
            Wh=rng.uniform(-s, s, size=(k, m)),
            Wc=rng.uniform(-s, s, size=(k, d_claim)),
            Wa=rng.uniform(-s, s, size=(k, d_aspect)),
            b=rng.uniform(-s, s, size=(k,)),
            v=rng.uniform(-s, s, size=(k,)),
        )


def attention_forward(states: Array, claim_vec: Array, aspect_vec: Array,
                      params: AttentionParams) -> tuple[Array, Array, tuple]:
    """Attend over (N, m) states conditioned on claim and aspect vectors.

    Returns (context (m,), weights (N,), cache).  Weights are a softmax,
    so they are nonnegative and sum to one.
    """
    if states.shape[0] == 0:
        raise ValueError("cannot attend over zero states")
    q = params.Wc @ claim_vec + params.Wa @ aspect_vec + params.b
    proj = states @ params.Wh.T + q
    u = np.tanh(proj)
    e = u @ params.v
    w = softmax(e)
    context = w @ states
    cache = (states, claim_vec, aspect_vec, u, w)
    return context, w, cache


def attention_backward(dcontext: Array, cache: tuple, params: AttentionParams,
                       dweights: Array | None = None):
    """Backward for attention_forward.

    Returns (dstates, dclaim_vec, daspect_vec, grads) with grads keyed
    'Wh', 'Wc', 'Wa', 'b', 'v'.  ``dweights`` adds an upstream gradient on
    the attention weights themselves (unused by the classifier but kept
    for completeness).
    """
    states, claim_vec, aspect_vec, u, w = cache
    dw = states @ dcontext
    if dweights is not None:
        dw = dw + dweights
    dstates = np.outer(w, dcontext)
    # softmax backward: de_j = w_j (dw_j - sum_k w_k dw_k)
    de = w * (dw - float(w @ dw))
    dv = u.T @ de
    du = np.outer(de, params.v)
    dproj = du * (1.0 - u * u)
    dWh = dproj.T @ states
    dstates += dproj @ params.Wh
    dq = dproj.sum(axis=0)
    grads = {
        "Wh": dWh,
        "Wc": np.outer(dq, claim_vec),
        "Wa": np.outer(dq, aspect_vec),
        "b": dq,
        "v": dv,
    }
    dclaim_vec = params.Wc.T @ dq
    daspect_vec = params.Wa.T @ dq
    return dstates, dclaim_vec, daspect_vec, grads


# ---------------------------------------------------------------------------
# Dense head, dropout, optimizers
# ---------------------------------------------------------------------------

def dense_forward(x: Array, W: Array, b: Array) -> Array:
    return W @ x + b


def dense_backward(dout: Array, x: Array, W: Array):
    """Returns (dx, dW, db) for dense_forward."""
    return W.T @ dout, np.outer(dout, x), dout


def dropout_mask(shape, keep_prob: float, rng: np.random.Generator) -> Array:
    """Inverted-dropout mask: zeros with probability 1 - keep_prob."""
    if not 0.0 < keep_prob <= 1.0:
        raise ValueError("keep_prob must be in (0, 1]")
    if keep_prob == 1.0:
        return np.ones(shape)
    return (rng.random(shape) < keep_prob) / keep_prob


@dataclass
class TrainConfig:
    """Hyperparameters shared by both trainable models."""

    learning_rate: float = 0.001
    keep_prob: float = 0.3
    epochs: int = 50
    batch_size: int = 8
    seed: int = 0
    optimizer: str = "sgd"  # "sgd" | "adam"

    def __post_init__(self):
        if self.learning_rate <= 0:
            raise ValueError("learning_rate must be > 0")
        if not 0.0 < self.keep_prob <= 1.0:
            raise ValueError("keep_prob must be in (0, 1]")
        if self.optimizer not in ("sgd", "adam"):
            raise ValueError(f"unknown optimizer {self.optimizer!r}")


class SGD:
    def __init__(self, learning_rate: float):
        self.lr = learning_rate

    def step(self, tensors: dict[str, Array], grads: dict[str, Array]) -> None:
        for name, g in grads.items():
            tensors[name] -= self.lr * g


class Adam:
    def __init__(self, learning_rate: float, beta1: float = 0.9,
                 beta2: float = 0.999, eps: float = 1e-8):
        self.lr = learning_rate
        self.beta1 = beta1
        self.beta2 = beta2
        self.eps = eps
        self.t = 0
        self.m: dict[str, Array] = {}
        self.v: dict[str, Array] = {}

    def step(self, tensors: dict[str, Array], grads: dict[str, Array]) -> None:
        self.t += 1
        b1, b2 = self.beta1, self.beta2
        for name, g in grads.items():
            m = self.m.setdefault(name, np.zeros_like(g))
            v = self.v.setdefault(name, np.zeros_like(g))
            m *= b1
            m += (1 - b1) * g
            v *= b2
            v += (1 - b2) * g * g
            m_hat = m / (1 - b1 ** self.t)
            v_hat = v / (1 - b2 ** self.t)
            tensors[name] -= self.lr * m_hat / (np.sqrt(v_hat) + self.eps)


def make_optimizer(config: TrainConfig):
    if config.optimizer == "adam":
        return Adam(config.learning_rate)
    return SGD(config.learning_rate)


# ---------------------------------------------------------------------------
# Parameter plumbing and the shared gradient-check harness
# ---------------------------------------------------------------------------

def named_lstm_tensors(prefix: str, p: LSTMParams):
    yield f"{prefix}.Wx", p.Wx
    yield f"{prefix}.Wh", p.Wh
    yield f"{prefix}.b", p.b


def named_bilstm_tensors(prefix: str, p: BiLSTMParams):
    yield from named_lstm_tensors(f"{prefix}.fwd", p.fwd)
    yield from named_lstm_tensors(f"{prefix}.bwd", p.bwd)


def named_attention_tensors(prefix: str, p: AttentionParams):
    for f in fields(p):
        yield f"{prefix}.{f.name}", getattr(p, f.name)


def clone_tensors(tensors: dict[str, Array]) -> dict[str, Array]:
    return {k: v.copy() for k, v in tensors.items()}


def accumulate(into: dict[str, Array], grads: dict[str, Array], prefix: str = "",
               scale: float = 1.0) -> None:
    """Add ``scale * grads`` into the accumulator under ``prefix``-ed keys."""
    for k, v in grads.items():
        name = f"{prefix}{k}" if prefix else k
        if name not in into:
            into[name] = scale * v
        else:
            into[name] += scale * v


def gradient_check(loss_fn, tensors: dict[str, Array],
                   analytic: dict[str, Array], eps: float = 1e-4) -> dict[str, float]:
    """Compare analytic gradients against central finite differences.

    ``loss_fn`` is a zero-argument callable evaluating the loss with the
    live ``tensors`` (which are perturbed in place and restored).  For
    every tensor the full elementwise finite-difference gradient is
    computed and the relative L2 error
    ``|g_fd - g_an| / max(|g_fd|, |g_an|)`` reported; a pair of all-zero
    gradients counts as error 0.
    """
    errors: dict[str, float] = {}
    for name, arr in tensors.items():
        g_an = analytic.get(name)
        if g_an is None:
            g_an = np.zeros_like(arr)
        g_fd = np.zeros_like(arr)
        it = np.nditer(arr, flags=["multi_index"])
        for _ in it:
            idx = it.multi_index
            orig = arr[idx]
            arr[idx] = orig + eps
            lp = loss_fn()
            arr[idx] = orig - eps
            lm = loss_fn()
            arr[idx] = orig
            g_fd[idx] = (lp - lm) / (2.0 * eps)
        na = float(np.linalg.norm(g_an))
        nf = float(np.linalg.norm(g_fd))
        denom = max(na, nf)
        errors[name] = 0.0 if denom < 1e-12 else float(np.linalg.norm(g_an - g_fd)) / denom
    return errors


def deep_copy_params(params):
    """Snapshot helper for best-epoch tracking during training."""
    return copy.deepcopy(params)
